//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of decreasing error estimate until the
//! summed estimate falls under `max(abs_tol, rel_tol * |I|)`. Semi-infinite
//! ranges are mapped onto `(0, 1]` with `x = a + (1 - t) / t`.
//!
//! A non-integrable endpoint singularity is detected by watching the
//! interval that touches the endpoint: for `x^{-α}` its integral shrinks like
//! `h^{1-α}` under bisection, but stays flat (or grows) when `α >= 1`. After
//! [`STALL_DEPTH`] halvings without the endpoint piece at least halving,
//! [`Error::QuadratureNotConverged`] is returned. Callers use that as a
//! divergence signal alongside truncated integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Halvings of an endpoint interval between stagnation checks.
pub const STALL_DEPTH: u32 = 32;

/// Upper end of an integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper<T> {
    Finite(T),
    Infinity,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::quad_tol(),
            rel_tol: T::quad_tol(),
            max_intervals: 4000,
        }
    }
}

impl<T: Scalar> QuadratureOptions<T> {
    pub fn with_tolerance(tol: T) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

/// A converged integral with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
    depth: u32,
    /// `|value|` of the endpoint ancestor at the last checkpoint, for intervals touching `a` or `b`.
    anchor: Option<T>,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Segment<T> {}

impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod15<T, F>(f: &F, lo: T, hi: T) -> Result<(T, T)>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let center = (lo + hi) * T::half();
    let half = (hi - lo) * T::half();
    let eval = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand(x.as_f64()))
        }
    };

    let fc = eval(center)?;
    let mut res_k = T::of(WGK[7]) * fc;
    let mut res_g = T::of(WG[3]) * fc;
    let mut res_abs = res_k.abs();
    let mut pairs = [(T::zero(), T::zero()); 7];
    for (j, pair) in pairs.iter_mut().enumerate() {
        let dx = half * T::of(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        *pair = (f1, f2);
        res_k = res_k + T::of(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::of(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::of(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * T::half();
    let mut res_asc = T::of(WGK[7]) * (fc - mean).abs();
    for (j, &(f1, f2)) in pairs.iter().enumerate() {
        res_asc = res_asc + T::of(WGK[j]) * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let width = half.abs();
    let value = res_k * half;
    res_abs = res_abs * width;
    res_asc = res_asc * width;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc > T::zero() && err > T::zero() {
        let ratio = (T::of(200.0) * err / res_asc).powf(T::of(1.5));
        err = res_asc * ratio.min(T::one());
    }
    let floor = T::epsilon() * T::of(50.0) * res_abs;
    if res_abs > T::min_positive_value() / (T::epsilon() * T::of(50.0)) {
        err = err.max(floor);
    }
    Ok((value, err))
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: T, b: T, opts: &QuadratureOptions<T>) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "finite bounds required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    if a > b {
        let q = integrate(f, b, a, opts)?;
        return Ok(Quadrature {
            value: -q.value,
            ..q
        });
    }

    let (value, error) = kronrod15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo: a,
        hi: b,
        value,
        error,
        depth: 0,
        anchor: Some(value.abs()),
    });
    // Intervals too narrow to bisect further; kept out of the heap.
    let mut frozen: Vec<Segment<T>> = Vec::new();
    let mut count = 1usize;

    loop {
        let mut total = CompensatedSum::new();
        let mut total_err = T::zero();
        for s in heap.iter().chain(frozen.iter()) {
            total.add(s.value);
            total_err = total_err + s.error;
        }
        let total = total.value();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            return Ok(Quadrature {
                value: total,
                error: total_err,
                intervals: count,
            });
        }
        let worst = match heap.pop() {
            Some(s) if count < opts.max_intervals => s,
            other => {
                if let Some(s) = other {
                    heap.push(s);
                }
                return Err(Error::QuadratureNotConverged {
                    achieved: total_err.as_f64(),
                    intervals: count,
                });
            }
        };
        let mid = (worst.lo + worst.hi) * T::half();
        let scale = worst
            .lo
            .abs()
            .max(worst.hi.abs())
            .max(T::min_positive_value());
        if !(mid > worst.lo && mid < worst.hi)
            || (worst.hi - worst.lo) <= T::epsilon() * T::of(16.0) * scale
        {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = kronrod15(&f, worst.lo, mid)?;
        let (v2, e2) = kronrod15(&f, mid, worst.hi)?;
        let depth = worst.depth + 1;
        let mut children = [
            Segment {
                lo: worst.lo,
                hi: mid,
                value: v1,
                error: e1,
                depth,
                anchor: worst.anchor.filter(|_| worst.lo == a),
            },
            Segment {
                lo: mid,
                hi: worst.hi,
                value: v2,
                error: e2,
                depth,
                anchor: worst.anchor.filter(|_| worst.hi == b),
            },
        ];
        for c in children.iter_mut() {
            if let Some(anchor) = c.anchor {
                if depth % STALL_DEPTH == 0 {
                    if depth >= 2 * STALL_DEPTH
                        && c.value.abs() > T::half() * anchor
                        && c.error > T::zero()
                    {
                        return Err(Error::QuadratureNotConverged {
                            achieved: (total_err + c.error).as_f64(),
                            intervals: count,
                        });
                    }
                    c.anchor = Some(c.value.abs());
                }
            }
        }
        let [c1, c2] = children;
        heap.push(c1);
        heap.push(c2);
        count += 1;
    }
}

/// Integrates `f` over `[a, ∞)` via `x = a + (1 - t) / t`.
pub fn integrate_to_infinity<T, F>(f: F, a: T, opts: &QuadratureOptions<T>) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mapped = |t: T| {
        let x = a + (T::one() - t) / t;
        let fx = f(x);
        if fx == T::zero() {
            T::zero()
        } else {
            fx / (t * t)
        }
    };
    integrate(mapped, T::zero(), T::one(), opts)
}

/// Integrates over `[lo, upper]`, dispatching on whether the upper end is finite.
pub fn integrate_range<T, F>(
    f: F,
    lo: T,
    upper: Upper<T>,
    opts: &QuadratureOptions<T>,
) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    match upper {
        Upper::Finite(hi) => integrate(f, lo, hi, opts),
        Upper::Infinity => integrate_to_infinity(f, lo, opts),
    }
}
