//! Scalar laws driving the example processes, sampled by inverse transform.
//!
//! All three laws have elementary antiderivatives, so density, CDF and
//! inverse CDF are closed-form on every branch.
//!
//! * `ξ` on `(-1, 1)`: `f(x) = e^{x/(1+x)} / (2(1+x)^2)` for `x <= 0` and the
//!   mirror image `e^{-x/(1-x)} / (2(1-x)^2)` for `x >= 0`.
//! * `η` on `[-1/2, 0] ∪ [1, ∞)`: `g(x) = 1 - 3x` on the left piece (mass 7/8)
//!   and `1 / (4x^3)` on the right piece (mass 1/8).
//! * `τ₁`: unit-rate exponential.

use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Upper;
use crate::scalar::Scalar;

/// Which closed-form law a distribution implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Xi,
    Eta,
    UnitExponential,
}

/// A maximal interval on which the density is smooth and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: Upper<T>,
}

/// A scalar law given by density, CDF and inverse CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InverseCdfDistribution<T> {
    law: Law,
    _scalar: PhantomData<T>,
}

pub fn make_xi_distribution<T: Scalar>() -> InverseCdfDistribution<T> {
    InverseCdfDistribution::new(Law::Xi)
}

pub fn make_eta_distribution<T: Scalar>() -> InverseCdfDistribution<T> {
    InverseCdfDistribution::new(Law::Eta)
}

/// Law of the first jump of a standard Poisson process.
pub fn make_first_jump_time<T: Scalar>() -> InverseCdfDistribution<T> {
    InverseCdfDistribution::new(Law::UnitExponential)
}

/// Inverse-transform sample: `inverse_cdf(u)` for `u` in the open unit interval.
pub fn sample<T: Scalar>(dist: &InverseCdfDistribution<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::UniformOutOfRange(u.as_f64()));
    }
    Ok(dist.inverse_cdf(u))
}

/// Cumulative mass of the left piece of `η`.
fn eta_break<T: Scalar>() -> T {
    T::of(0.875)
}

impl<T: Scalar> InverseCdfDistribution<T> {
    pub fn new(law: Law) -> Self {
        Self {
            law,
            _scalar: PhantomData,
        }
    }

    pub fn law(&self) -> Law {
        self.law
    }

    /// Closure of the support: `(lower, upper)`.
    pub fn support(&self) -> (T, Upper<T>) {
        match self.law {
            Law::Xi => (-T::one(), Upper::Finite(T::one())),
            Law::Eta => (-T::half(), Upper::Infinity),
            Law::UnitExponential => (T::zero(), Upper::Infinity),
        }
    }

    /// Smooth pieces of the density, in increasing order.
    pub fn pieces(&self) -> Vec<Piece<T>> {
        match self.law {
            Law::Xi => vec![
                Piece {
                    lo: -T::one(),
                    hi: Upper::Finite(T::zero()),
                },
                Piece {
                    lo: T::zero(),
                    hi: Upper::Finite(T::one()),
                },
            ],
            Law::Eta => vec![
                Piece {
                    lo: -T::half(),
                    hi: Upper::Finite(T::zero()),
                },
                Piece {
                    lo: T::one(),
                    hi: Upper::Infinity,
                },
            ],
            Law::UnitExponential => vec![Piece {
                lo: T::zero(),
                hi: Upper::Infinity,
            }],
        }
    }

    pub fn density(&self, x: T) -> T {
        let one = T::one();
        match self.law {
            Law::Xi => {
                if x <= -one || x >= one {
                    T::zero()
                } else if x <= T::zero() {
                    let s = one + x;
                    (x / s).exp() / (T::two() * s * s)
                } else {
                    let s = one - x;
                    (-x / s).exp() / (T::two() * s * s)
                }
            }
            Law::Eta => {
                if x >= -T::half() && x <= T::zero() {
                    one - T::of(3.0) * x
                } else if x >= one {
                    one / (T::of(4.0) * x * x * x)
                } else {
                    T::zero()
                }
            }
            Law::UnitExponential => {
                if x < T::zero() {
                    T::zero()
                } else {
                    (-x).exp()
                }
            }
        }
    }

    /// `ln density(x)`, `-∞` off the support. Stays finite where the density
    /// itself underflows (ξ near ±1, the exponential far out).
    pub fn log_density(&self, x: T) -> T {
        let one = T::one();
        match self.law {
            Law::Xi => {
                if x <= -one || x >= one {
                    T::neg_infinity()
                } else if x <= T::zero() {
                    x / (one + x) - T::LN_2() - T::two() * x.ln_1p()
                } else {
                    -x / (one - x) - T::LN_2() - T::two() * (-x).ln_1p()
                }
            }
            Law::Eta => {
                if x >= -T::half() && x <= T::zero() {
                    (-T::of(3.0) * x).ln_1p()
                } else if x >= one {
                    -T::of(4.0).ln() - T::of(3.0) * x.ln()
                } else {
                    T::neg_infinity()
                }
            }
            Law::UnitExponential => {
                if x < T::zero() {
                    T::neg_infinity()
                } else {
                    -x
                }
            }
        }
    }

    /// `inverse_cdf(½)`.
    pub fn median(&self) -> T {
        self.inverse_cdf(T::half())
    }

    pub fn cdf(&self, x: T) -> T {
        let one = T::one();
        match self.law {
            Law::Xi => {
                if x <= -one {
                    T::zero()
                } else if x >= one {
                    one
                } else if x <= T::zero() {
                    T::half() * (x / (one + x)).exp()
                } else {
                    one - T::half() * (-x / (one - x)).exp()
                }
            }
            Law::Eta => {
                if x < -T::half() {
                    T::zero()
                } else if x <= T::zero() {
                    // ∫_{-1/2}^{x} (1 - 3s) ds
                    x - T::of(1.5) * x * x + eta_break::<T>()
                } else if x < one {
                    eta_break()
                } else {
                    one - one / (T::of(8.0) * x * x)
                }
            }
            Law::UnitExponential => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }

    /// Closed-form inverse CDF; `u` is expected in `(0, 1)`.
    pub fn inverse_cdf(&self, u: T) -> T {
        let one = T::one();
        match self.law {
            Law::Xi => {
                if u <= T::half() {
                    // y = x / (1 + x) = ln(2u) <= 0
                    let y = (T::two() * u).ln();
                    y / (one - y)
                } else {
                    // y = x / (1 - x) = -ln(2(1 - u)) >= 0
                    let y = -(T::two() * (one - u)).ln();
                    y / (one + y)
                }
            }
            Law::Eta => {
                if u < eta_break() {
                    // smaller root of 1.5x² - x + c = 0, c = u - 7/8, in cancellation-free form
                    let c = u - eta_break::<T>();
                    let disc = T::of(6.25) - T::of(6.0) * u;
                    T::two() * c / (one + disc.sqrt())
                } else {
                    one / (T::of(8.0) * (one - u)).sqrt()
                }
            }
            Law::UnitExponential => -(-u).ln_1p(),
        }
    }
}
