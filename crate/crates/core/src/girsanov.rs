//! Pathwise measure-change algebra: splitting `E_T(M)` into the density
//! `E_T(∫a dM)` and the exponential of the transformed martingale `Ñ`,
//! plus the scalar inequalities used to bound the transformed functional.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paths::{Jump, JumpPath, PredictableControl};
use crate::scalar::{CompensatedSum, Scalar};
use crate::stochexp::{jacod_jump_term, log_stoch_exponential};

/// Result of [`decompose`], evaluated at the path horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureChangeDecomposition<T> {
    /// `ln E_T(∫a dM)`
    pub log_density: T,
    /// `ln Ẽ_T(Ñ)`
    pub log_transformed: T,
    /// Jumps `ΔÑ = (1 - a)ΔM / (1 + aΔM)`.
    pub transformed_jumps: Vec<Jump<T>>,
    /// `Ñ_T`, including the finite-variation correction.
    pub transformed_terminal: T,
    pub density_factor: T,
    pub transformed_exponential: T,
    pub product: T,
}

impl<T: Scalar> MeasureChangeDecomposition<T> {
    pub fn log_product(&self) -> T {
        self.log_density + self.log_transformed
    }
}

/// `ΔÑ = (1 - a)Δ / (1 + aΔ)`.
#[inline]
pub fn transformed_jump<T: Scalar>(a: T, dm: T) -> T {
    (T::one() - a) * dm / (T::one() + a * dm)
}

fn check_jumps<T: Scalar>(path: &JumpPath<T>) -> Result<()> {
    for j in path.jumps() {
        if !(j.dm > -T::one()) {
            return Err(Error::JumpTooSmall {
                time: j.t.as_f64(),
                size: j.dm.as_f64(),
            });
        }
    }
    Ok(())
}

/// Per-segment increments `(a, Δdrift, Δ⟨M^c⟩)` of the control over `[0, t]`.
fn segment_increments<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
    t: T,
) -> Vec<(T, T, T)> {
    let mut out = Vec::new();
    for (lo, hi, v) in a.segments() {
        if lo >= t {
            break;
        }
        let end = hi.map_or(t, |h| h.min(t));
        out.push((
            v,
            path.drift_at(end) - path.drift_at(lo),
            path.cont_qv_at(end) - path.cont_qv_at(lo),
        ));
    }
    out
}

/// Splits `E_T(M)` under the change of measure with density `E_T(∫a dM)`.
///
/// With `D = ∫a dM` and `N = ∫(1 - a) dM`,
/// `Ñ = N - Σ a(1-a)ΔM²/(1+aΔM) - ∫a(1-a) d⟨M^c⟩` and
/// `E_T(M) = E_T(D) · Ẽ_T(Ñ)` holds path by path.
pub fn decompose<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
) -> Result<MeasureChangeDecomposition<T>> {
    check_jumps(path)?;
    let t = path.horizon();
    let segments = segment_increments(path, a, t);

    let mut density = CompensatedSum::new();
    let mut transformed = CompensatedSum::new();
    let mut terminal = CompensatedSum::new();
    for &(v, ddrift, dqv) in &segments {
        let w = T::one() - v;
        density.add_product(v, ddrift);
        density.add_product(-T::half() * v * v, dqv);
        transformed.add_product(w, ddrift);
        transformed.add_product(-(v * w + T::half() * w * w), dqv);
        terminal.add_product(w, ddrift);
        terminal.add_product(-v * w, dqv);
    }

    let mut transformed_jumps = Vec::with_capacity(path.jumps().len());
    for j in path.jumps_until(t) {
        let v = a.value_at(j.t);
        let dn = transformed_jump(v, j.dm);
        if !(dn > -T::one()) {
            return Err(Error::Domain(format!(
                "transformed jump {dn} at t = {} is not > -1",
                j.t
            )));
        }
        // ΔD - ΔD cancels inside ln E(D); likewise ΔÑ inside ln Ẽ(Ñ)
        density.add((v * j.dm).ln_1p());
        transformed.add(dn.ln_1p());
        // Ñ jump = (1-a)Δ minus the correction (1-a)Δ - ΔÑ
        terminal.add_product(T::one() - v, j.dm);
        terminal.add(-((T::one() - v) * j.dm - dn));
        transformed_jumps.push(Jump { t: j.t, dm: dn });
    }

    let log_density = density.value();
    let log_transformed = transformed.value();
    let density_factor = log_density.exp();
    let transformed_exponential = log_transformed.exp();
    Ok(MeasureChangeDecomposition {
        log_density,
        log_transformed,
        transformed_jumps,
        transformed_terminal: terminal.value(),
        density_factor,
        transformed_exponential,
        product: (log_density + log_transformed).exp(),
    })
}

/// `E_T(∫a dM) · Ẽ_T(Ñ) - E_T(M)`.
pub fn product_identity_residual<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
) -> Result<T> {
    let d = decompose(path, a)?;
    let e = log_stoch_exponential(path, path.horizon())?.exp();
    Ok(d.density_factor * d.transformed_exponential - e)
}

/// The product-identity residual relative to `E_T(M)`.
///
/// Computed as `expm1(ln product - ln E_T(M))`, so it stays meaningful when
/// `E_T(M)` is tiny. When `E_T(M)` underflows to zero and the product does
/// too, the identity holds in representable arithmetic and the result is 0.
pub fn relative_identity_residual<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
) -> Result<T> {
    let d = decompose(path, a)?;
    let log_e = log_stoch_exponential(path, path.horizon())?;
    if log_e.exp() == T::zero() {
        return Ok(if d.product == T::zero() {
            T::zero()
        } else {
            T::infinity()
        });
    }
    Ok((d.log_product() - log_e).exp_m1())
}

/// `½∫(1-a)² d⟨M^c⟩ + Σ [ln(1+ΔM) - ln(1+aΔM) - (1-a)ΔM/(1+ΔM)]` on `[0, t]`:
/// the log of the Jacod functional of `Ñ`, written in terms of `M`.
pub fn transformed_jacod_integrand<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
    t: T,
) -> Result<T> {
    path.check_time(t)?;
    check_jumps(path)?;
    let mut acc = CompensatedSum::new();
    for (v, _, dqv) in segment_increments(path, a, t) {
        let w = T::one() - v;
        acc.add_product(T::half() * w * w, dqv);
    }
    for j in path.jumps_until(t) {
        let v = a.value_at(j.t);
        acc.add(j.dm.ln_1p());
        acc.add(-(v * j.dm).ln_1p());
        acc.add(-(T::one() - v) * j.dm / (T::one() + j.dm));
    }
    Ok(acc.value())
}

fn check_unit_closed<T: Scalar>(name: &str, x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} outside [0, 1]")))
    }
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps < T::one() {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps.as_f64()))
    }
}

fn check_jump_size<T: Scalar>(dm: T) -> Result<()> {
    if dm > -T::one() && dm.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "jump size {dm} must be finite and > -1"
        )))
    }
}

/// `(1 - ε²)x² - 2x + 1 + 2ε·1_{1-x<ε}`, nonnegative on `[0, 1] × (0, 1)`.
pub fn lemma2_lhs<T: Scalar>(x: T, eps: T) -> Result<T> {
    check_unit_closed("x", x)?;
    check_eps(eps)?;
    let boost = if T::one() - x < eps {
        T::two() * eps
    } else {
        T::zero()
    };
    let quad = (T::one() - eps * eps) * x * x - T::two() * x + T::one();
    Ok(quad + boost)
}

/// `ln(1 + a·dm) + (1 - a)dm/(1 + dm) - dm/(1 + dm)`, nonnegative for `a ∈ [0, 1]`.
pub fn lemma3_gap<T: Scalar>(a: T, dm: T) -> Result<T> {
    check_unit_closed("a", a)?;
    check_jump_size(dm)?;
    Ok((a * dm).ln_1p() - a * dm / (T::one() + dm))
}

/// `[ln(1+Δ) - Δ/(1+Δ)] - [ln(1+aΔ) - aΔ/(1+aΔ)]`, nonnegative for `a ∈ [0, 1]`.
pub fn monotone_reduction_gap<T: Scalar>(a: T, dm: T) -> Result<T> {
    check_unit_closed("a", a)?;
    check_jump_size(dm)?;
    Ok(jacod_jump_term(dm) - jacod_jump_term(a * dm))
}
