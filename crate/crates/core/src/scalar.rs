//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

/// Floating-point scalar the library is generic over (`f32`, `f64`).
pub trait Scalar:
    Float + FloatConst + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`, rounding as needed.
    #[inline]
    fn of(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }

    /// Default quadrature tolerance: `1e-10`, floored at a few hundred ulps for narrow types.
    #[inline]
    fn quad_tol() -> Self {
        Self::of(1e-10).max(Self::epsilon() * Self::of(64.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated accumulator.
///
/// The log-space functionals add terms of size `e^{τ}` that cancel down to
/// O(1); compensation keeps that cancellation from eating the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    /// Adds `a * b` together with its exact rounding error (two-product via FMA).
    #[inline]
    pub fn add_product(&mut self, a: T, b: T) {
        let p = a * b;
        let err = a.mul_add(b, -p);
        self.add(p);
        self.add(err);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Pairwise (cascade) summation in a fixed order; the result depends only on
/// the slice contents, never on how the slice was produced.
pub fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        let mut s = T::zero();
        for &x in xs {
            s = s + x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let big = 1.0e16_f64;
        let mut acc = CompensatedSum::new();
        acc.add(big);
        acc.add(1.0);
        acc.add(-big);
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn add_product_keeps_rounding_error() {
        let a = 0.75_f64;
        let b = std::f64::consts::E.powi(30);
        let mut acc = CompensatedSum::new();
        acc.add_product(a, b);
        acc.add_product(-a, b);
        assert_eq!(acc.value(), 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 55.0);
        let ys: Vec<f64> = (0..1000).map(|i| (i % 7) as f64).collect();
        assert_eq!(pairwise_sum(&ys), ys.iter().sum::<f64>());
    }

    #[test]
    fn quad_tol_respects_precision() {
        assert_eq!(<f64 as Scalar>::quad_tol(), 1e-10);
        assert!(<f32 as Scalar>::quad_tol() > 1e-6);
    }
}
