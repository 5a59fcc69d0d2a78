use serde::{Deserialize, Serialize};

use crate::distributions::InverseCdfDistribution;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_range, Quadrature, QuadratureOptions, Upper};
use crate::scalar::{CompensatedSum, Scalar};

/// Restriction of a law's support to a sub-range approaching a singular end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "snake_case")]
pub enum Truncation<T> {
    /// Drop `[lo, lo + δ)` at the lower end of the support.
    LowerGap(T),
    /// Drop everything above the cap.
    Upper(T),
}

fn ranges<T: Scalar>(
    dist: &InverseCdfDistribution<T>,
    truncation: Option<Truncation<T>>,
) -> Result<Vec<(T, Upper<T>)>> {
    let (support_lo, _) = dist.support();
    let mut out = Vec::new();
    for piece in dist.pieces() {
        let (mut lo, mut hi) = (piece.lo, piece.hi);
        match truncation {
            None => {}
            Some(Truncation::LowerGap(d)) => {
                if !(d > T::zero() && d.is_finite()) {
                    return Err(Error::InvalidLevels(format!("gap {d} must be positive")));
                }
                lo = lo.max(support_lo + d);
            }
            Some(Truncation::Upper(cap)) => {
                if !(cap > support_lo && cap.is_finite()) {
                    return Err(Error::InvalidLevels(format!(
                        "cap {cap} outside the support"
                    )));
                }
                hi = match hi {
                    Upper::Finite(h) => Upper::Finite(h.min(cap)),
                    Upper::Infinity => Upper::Finite(cap),
                };
            }
        }
        if let Upper::Finite(h) = hi {
            if h <= lo {
                continue;
            }
        }
        out.push((lo, hi));
    }
    Ok(out)
}

fn integrate_pieces<T, F>(
    dist: &InverseCdfDistribution<T>,
    weighted: F,
    truncation: Option<Truncation<T>>,
) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let opts = QuadratureOptions::default();
    let mut value = CompensatedSum::new();
    let mut error = T::zero();
    let mut intervals = 0;
    for (lo, hi) in ranges(dist, truncation)? {
        let q = integrate_range(&weighted, lo, hi, &opts)?;
        value.add(q.value);
        error = error + q.error;
        intervals += q.intervals;
    }
    Ok(Quadrature {
        value: value.value(),
        error,
        intervals,
    })
}

/// `∫ integrand(x) density(x) dx` over the (truncated) support, adaptively to
/// `1e-10` absolute or relative accuracy on each smooth piece.
pub fn quadrature_expectation<T, F>(
    dist: &InverseCdfDistribution<T>,
    integrand: F,
    truncation: Option<Truncation<T>>,
) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_pieces(dist, |x| integrand(x) * dist.density(x), truncation)
}

/// Like [`quadrature_expectation`] for an integrand given by its logarithm:
/// integrates `exp(log_integrand(x) + ln density(x))`, so a huge integrand
/// against a vanishing density never forms `∞ · 0`.
pub fn quadrature_log_expectation<T, F>(
    dist: &InverseCdfDistribution<T>,
    log_integrand: F,
    truncation: Option<Truncation<T>>,
) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_pieces(
        dist,
        |x| {
            let l = log_integrand(x);
            if l == T::neg_infinity() {
                T::zero()
            } else {
                (l + dist.log_density(x)).exp()
            }
        },
        truncation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_eta_distribution, make_first_jump_time, make_xi_distribution};

    #[test]
    fn normalization_and_means() {
        for d in [
            make_xi_distribution::<f64>(),
            make_eta_distribution(),
            make_first_jump_time(),
        ] {
            let one = quadrature_expectation(&d, |_| 1.0, None).unwrap();
            assert!((one.value - 1.0).abs() < 1e-8, "{:?}", d.law());
        }
        let xi = quadrature_expectation(&make_xi_distribution::<f64>(), |x| x, None).unwrap();
        assert!(xi.value.abs() < 1e-8);
        let eta = quadrature_expectation(&make_eta_distribution::<f64>(), |x| x, None).unwrap();
        assert!(eta.value.abs() < 1e-8);
        let ex = quadrature_expectation(&make_first_jump_time::<f64>(), |x| x, None).unwrap();
        assert!((ex.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_exponential_moment_is_linear() {
        let d = make_first_jump_time::<f64>();
        for t in [10.0, 20.0, 40.0, 80.0] {
            let q = quadrature_expectation(&d, |x| x.exp(), Some(Truncation::Upper(t))).unwrap();
            assert!((q.value - t).abs() < 1e-8 * t);
        }
    }

    #[test]
    fn eta_second_moment_grows_like_quarter_log() {
        // ∫_1^R x² / (4x³) dx = ¼ ln R, plus the bounded left piece
        let d = make_eta_distribution::<f64>();
        let left = quadrature_expectation(&d, |x| x * x, Some(Truncation::Upper(0.5)))
            .unwrap()
            .value;
        for r in [1e2, 1e4, 1e6] {
            let q = quadrature_expectation(&d, |x| x * x, Some(Truncation::Upper(r)))
                .unwrap()
                .value;
            assert!((q - left - 0.25 * f64::ln(r)).abs() < 1e-8);
        }
        assert!(quadrature_expectation(&d, |x| x * x, None).is_err());
    }

    #[test]
    fn log_form_matches_plain_form() {
        let d = make_xi_distribution::<f64>();
        let f = |x: f64| (1.0 + x).powi(2) * (-x / (1.0 + x)).exp();
        let a = quadrature_expectation(&d, f, None).unwrap().value;
        let b = quadrature_log_expectation(&d, |x| f(x).ln(), None)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-10);
        assert!((a - 1.248740710242008).abs() < 1e-9);
    }

    #[test]
    fn gap_truncation_moves_lower_end() {
        let d = make_xi_distribution::<f64>();
        let q = quadrature_expectation(&d, |_| 1.0, Some(Truncation::LowerGap(0.5)))
            .unwrap()
            .value;
        assert!((q - (1.0 - d.cdf(-0.5))).abs() < 1e-12);
        assert!(quadrature_expectation(&d, |_| 1.0, Some(Truncation::LowerGap(-1.0))).is_err());
    }
}
