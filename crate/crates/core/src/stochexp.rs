//! The Doléans-Dade exponential and the pathwise integrands of the
//! uniform-integrability criteria.
//!
//! Every exponential-type functional is returned as a log-value. Example
//! paths carry jumps of size `e^{τ}`; exponentiating early overflows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{integrate_control, JumpPath, PredictableControl, ProcessModel};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::{CompensatedSum, Scalar};

/// ε used for the extended condition when none is given.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Natural log of a pathwise functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue<T> {
    pub log_value: T,
    pub finite: bool,
}

impl<T: Scalar> FunctionalValue<T> {
    pub fn from_log(log_value: T) -> Self {
        Self {
            log_value,
            finite: log_value.is_finite(),
        }
    }

    /// `exp(log_value)`; overflows to infinity when not representable.
    pub fn value(&self) -> T {
        self.log_value.exp()
    }
}

fn reject_bad_jumps<T: Scalar>(path: &JumpPath<T>) -> Result<()> {
    // JumpPath::new enforces ΔM > -1; re-checked here since the formulas take logs.
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

/// `ln(1 + Δ) - Δ / (1 + Δ)`, the per-jump term of Jacod's functional.
#[inline]
pub fn jacod_jump_term<T: Scalar>(dm: T) -> T {
    dm.ln_1p() - dm / (T::one() + dm)
}

fn log_exponential_upto<T: Scalar>(path: &JumpPath<T>, t: T, include_jump_at_t: bool) -> Result<T> {
    path.check_time(t)?;
    reject_bad_jumps(path)?;
    let jumps = if include_jump_at_t {
        path.jumps_until(t)
    } else {
        path.jumps_before(t)
    };
    // M_t - Σ ΔM_i is the drift, so the ΔM_i cancel against the e^{-ΔM_i} factors.
    let mut acc = CompensatedSum::new();
    acc.add(path.drift_at(t));
    acc.add(-T::half() * path.cont_qv_at(t));
    for j in jumps {
        acc.add(j.dm.ln_1p());
    }
    Ok(acc.value())
}

/// `ln E_t(M) = M_t - ½⟨M^c⟩_t + Σ_{s<=t} (ln(1 + ΔM_s) - ΔM_s)`.
pub fn log_stoch_exponential<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    log_exponential_upto(path, t, true)
}

/// `ln E_{t-}(M)`.
pub fn log_stoch_exponential_left<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    log_exponential_upto(path, t, false)
}

/// `E_t(M) = exp{M_t - ½⟨M^c⟩_t} Π_{0<s<=t} (1 + ΔM_s) e^{-ΔM_s}`.
pub fn stoch_exponential<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    Ok(log_stoch_exponential(path, t)?.exp())
}

/// `E_t(M) - 1 - ∫_0^t E_{s-}(M) dM_s`.
///
/// The stochastic integral is the jump sum `Σ E_{t_i-} ΔM_i` plus a Riemann
/// integral against the drift, evaluated by quadrature between jumps. Paths
/// with a continuous martingale part are rejected: the realized Brownian
/// path is not stored, so `∫ E dM^c` has no pathwise value.
pub fn sde_residual<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    path.check_time(t)?;
    if !path.cont_qv().is_zero() {
        return Err(Error::Domain(
            "SDE residual needs ⟨M^c⟩ ≡ 0: the continuous martingale path is not stored".into(),
        ));
    }
    let e_t = stoch_exponential(path, t)?;
    let mut acc = CompensatedSum::new();
    acc.add(e_t);
    acc.add(-T::one());
    for j in path.jumps_until(t) {
        let left = log_stoch_exponential_left(path, j.t)?.exp();
        acc.add_product(-left, j.dm);
    }
    let opts = QuadratureOptions::with_tolerance(T::of(1e-13).max(T::epsilon() * T::of(64.0)));
    let breaks = path.smooth_breaks(t);
    let drift = path.drift();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let probe = drift.rate((lo + hi) * T::half());
        if probe == T::zero() && drift.rate(lo) == T::zero() {
            continue;
        }
        let q = integrate(
            |s: T| {
                let e = log_stoch_exponential(path, s)
                    .map(|l| l.exp())
                    .unwrap_or(T::nan());
                e * drift.rate(s)
            },
            lo,
            hi,
            &opts,
        )?;
        acc.add(-q.value);
    }
    Ok(acc.value())
}

/// Jacod: `½⟨M^c⟩_t + Σ_{s<=t} (ln(1 + ΔM_s) - ΔM_s / (1 + ΔM_s))`.
pub fn jacod_functional<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<FunctionalValue<T>> {
    path.check_time(t)?;
    reject_bad_jumps(path)?;
    let mut acc = CompensatedSum::new();
    acc.add_product(T::half(), path.cont_qv_at(t));
    for j in path.jumps_until(t) {
        acc.add(jacod_jump_term(j.dm));
    }
    Ok(FunctionalValue::from_log(acc.value()))
}

/// Protter–Shimbo: `½⟨M^c⟩_t + ⟨M^d⟩_t`, using the model's closed-form `⟨M^d⟩`.
pub fn protter_shimbo_functional<T: Scalar, M: ProcessModel<T>>(
    model: &M,
    path: &JumpPath<T>,
    t: T,
) -> Result<FunctionalValue<T>> {
    path.check_time(t)?;
    let disc = model.disc_qv(path, t)?;
    Ok(FunctionalValue::from_log(
        T::half() * path.cont_qv_at(t) + disc,
    ))
}

/// `A_t = ½⟨M^c⟩_t + Σ_{s<=t} ((1 + ΔM_s) ln(1 + ΔM_s) - ΔM_s)`.
pub fn lepingle_memin_a<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    path.check_time(t)?;
    reject_bad_jumps(path)?;
    let mut acc = CompensatedSum::new();
    acc.add_product(T::half(), path.cont_qv_at(t));
    for j in path.jumps_until(t) {
        acc.add((T::one() + j.dm) * j.dm.ln_1p() - j.dm);
    }
    Ok(acc.value())
}

/// Lepingle–Mémin: log-value `B_t`, the compensator of `A`.
pub fn lepingle_memin_functional<T: Scalar, M: ProcessModel<T>>(
    model: &M,
    path: &JumpPath<T>,
    t: T,
) -> Result<FunctionalValue<T>> {
    path.check_time(t)?;
    let jumps_part = model.lm_compensator(path, t)?;
    Ok(FunctionalValue::from_log(
        T::half() * path.cont_qv_at(t) + jumps_part,
    ))
}

fn check_epsilon<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps < T::one() {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps.as_f64()))
    }
}

/// Integrand of the extended condition with control `a` and constant `ε`:
///
/// `∫a dM + ∫(½ - a) d⟨M^c⟩ + ε ∫1_{1-a<ε} d⟨M^c⟩
///   + Σ [ln(1+ΔM) - ΔM/(1+ΔM) + ln(1+aΔM) - aΔM]`.
pub fn theorem1_functional<T: Scalar>(
    path: &JumpPath<T>,
    a: &PredictableControl<T>,
    eps: T,
    t: T,
) -> Result<FunctionalValue<T>> {
    check_epsilon(eps)?;
    path.check_time(t)?;
    reject_bad_jumps(path)?;
    let mut acc = CompensatedSum::new();
    acc.add(integrate_control(path, a, t)?);
    for (lo, hi, v) in a.segments() {
        if lo >= t {
            break;
        }
        let end = hi.map_or(t, |h| h.min(t));
        let dqv = path.cont_qv_at(end) - path.cont_qv_at(lo);
        acc.add_product(T::half() - v, dqv);
        if T::one() - v < eps {
            acc.add_product(eps, dqv);
        }
    }
    for j in path.jumps_until(t) {
        let av = a.value_at(j.t);
        acc.add(jacod_jump_term(j.dm));
        acc.add((av * j.dm).ln_1p());
        acc.add_product(-av, j.dm);
    }
    Ok(FunctionalValue::from_log(acc.value()))
}

/// `E_t(M) (½⟨M^c⟩_t + Σ_{s<=t} (ln(1 + ΔM_s) - ΔM_s / (1 + ΔM_s)))`.
pub fn lemma1_functional<T: Scalar>(path: &JumpPath<T>, t: T) -> Result<T> {
    let bracket = jacod_functional(path, t)?.log_value;
    if bracket <= T::zero() {
        return Ok(T::zero());
    }
    Ok((log_stoch_exponential(path, t)? + bracket.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Jacod,
    ProtterShimbo,
    LepingleMemin,
    Theorem1,
    Lemma1,
}

impl ConditionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionKind::Jacod => "jacod",
            ConditionKind::ProtterShimbo => "protter_shimbo",
            ConditionKind::LepingleMemin => "lepingle_memin",
            ConditionKind::Theorem1 => "theorem1",
            ConditionKind::Lemma1 => "lemma1",
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "jacod" => Ok(ConditionKind::Jacod),
            "protter_shimbo" => Ok(ConditionKind::ProtterShimbo),
            "lepingle_memin" => Ok(ConditionKind::LepingleMemin),
            "theorem1" => Ok(ConditionKind::Theorem1),
            "lemma1" => Ok(ConditionKind::Lemma1),
            other => Err(Error::Parse(format!("unknown condition kind '{other}'"))),
        }
    }
}

/// A condition to evaluate; only `theorem1` carries a control and ε.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSpec<T> {
    kind: ConditionKind,
    control: Option<PredictableControl<T>>,
    epsilon: Option<T>,
}

impl<T: Scalar> ConditionSpec<T> {
    pub fn new(
        kind: ConditionKind,
        control: Option<PredictableControl<T>>,
        epsilon: Option<T>,
    ) -> Result<Self> {
        match kind {
            ConditionKind::Theorem1 => {
                let control = control.ok_or_else(|| {
                    Error::InvalidCondition("theorem1 needs a control process".into())
                })?;
                let eps = epsilon.unwrap_or_else(|| T::of(DEFAULT_EPSILON));
                check_epsilon(eps)?;
                Ok(Self {
                    kind,
                    control: Some(control),
                    epsilon: Some(eps),
                })
            }
            _ if control.is_some() || epsilon.is_some() => Err(Error::InvalidCondition(format!(
                "{kind} takes no control or epsilon"
            ))),
            _ => Ok(Self {
                kind,
                control: None,
                epsilon: None,
            }),
        }
    }

    pub fn simple(kind: ConditionKind) -> Result<Self> {
        Self::new(kind, None, None)
    }

    pub fn jacod() -> Self {
        Self::simple(ConditionKind::Jacod).expect("jacod spec is valid")
    }

    pub fn theorem1(control: PredictableControl<T>, epsilon: Option<T>) -> Result<Self> {
        Self::new(ConditionKind::Theorem1, Some(control), epsilon)
    }

    pub fn kind(&self) -> ConditionKind {
        self.kind
    }

    pub fn control(&self) -> Option<&PredictableControl<T>> {
        self.control.as_ref()
    }

    pub fn epsilon(&self) -> Option<T> {
        self.epsilon
    }

    /// Checks the model carries the compensators this condition needs.
    pub fn check_model<M: ProcessModel<T>>(&self, model: &M) -> Result<()> {
        let missing = match self.kind {
            ConditionKind::ProtterShimbo if !model.has_disc_qv() => Some("a closed-form ⟨M^d⟩"),
            ConditionKind::LepingleMemin if !model.has_lm_compensator() => {
                Some("a Lepingle–Mémin compensator")
            }
            _ => None,
        };
        match missing {
            Some(what) => Err(Error::UnsupportedModel {
                model: model.name().into(),
                what: what.into(),
            }),
            None => Ok(()),
        }
    }

    /// Natural log of the condition's pathwise integrand at time `t`.
    ///
    /// For the exponential criteria this is the log-value of the functional;
    /// for `lemma1` it is the log of `E_t(M) × bracket` (−∞ when the bracket is 0).
    pub fn log_integrand<M: ProcessModel<T>>(
        &self,
        model: &M,
        path: &JumpPath<T>,
        t: T,
    ) -> Result<T> {
        Ok(match self.kind {
            ConditionKind::Jacod => jacod_functional(path, t)?.log_value,
            ConditionKind::ProtterShimbo => protter_shimbo_functional(model, path, t)?.log_value,
            ConditionKind::LepingleMemin => lepingle_memin_functional(model, path, t)?.log_value,
            ConditionKind::Theorem1 => {
                let a = self.control.as_ref().expect("validated");
                let eps = self.epsilon.expect("validated");
                theorem1_functional(path, a, eps, t)?.log_value
            }
            ConditionKind::Lemma1 => {
                let bracket = jacod_functional(path, t)?.log_value;
                if bracket <= T::zero() {
                    T::neg_infinity()
                } else {
                    log_stoch_exponential(path, t)? + bracket.ln()
                }
            }
        })
    }
}

impl<T: Scalar> fmt::Display for ConditionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(a) = &self.control {
            write!(f, "(a={a}")?;
            if let Some(e) = self.epsilon {
                write!(f, ", eps={e}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{example1_model, example2_model, ContQv, Drift, Jump};

    fn single_jump(dm: f64) -> JumpPath<f64> {
        JumpPath::new(1.0, vec![Jump { t: 1.0, dm }], Drift::Zero, ContQv::Zero).unwrap()
    }

    fn e2_path(tau: f64) -> JumpPath<f64> {
        example2_model::<f64>().build_path(&[tau]).unwrap().path
    }

    #[test]
    fn exponential_of_trivial_path_is_one() {
        let p = JumpPath::<f64>::constant(2.0).unwrap();
        assert_eq!(stoch_exponential(&p, 2.0).unwrap(), 1.0);
        assert_eq!(sde_residual(&p, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn exponential_example1_is_one_plus_xi() {
        for xi in [-0.999, -0.5, 0.0, 0.3, 0.99] {
            let e = stoch_exponential(&single_jump(xi), 1.0).unwrap();
            assert!(
                (e - (1.0 + xi)).abs() < 1e-15 * (1.0 + xi).max(1.0),
                "xi={xi}"
            );
            assert!(sde_residual(&single_jump(xi), 1.0).unwrap().abs() <= 1e-16);
        }
    }

    #[test]
    fn exponential_example2_closed_form() {
        for tau in [0.01, 0.5, 1.0, 2.0, 4.0] {
            let p = e2_path(tau);
            let et = tau.exp();
            let oracle = std::f64::consts::E * (1.0 + et) * (-et).exp();
            let e = stoch_exponential(&p, tau).unwrap();
            assert!(
                (e - oracle).abs() <= 1e-12 * oracle,
                "tau={tau}: {e} vs {oracle}"
            );
        }
    }

    #[test]
    fn continuous_part_enters_with_minus_half() {
        let p = JumpPath::<f64>::new(
            2.0,
            vec![],
            Drift::Linear { slope: 0.3 },
            ContQv::Linear { rate: 0.5 },
        )
        .unwrap();
        let l = log_stoch_exponential(&p, 2.0).unwrap();
        assert!((l - (0.6 - 0.5)).abs() < 1e-15);
        assert!(sde_residual(&p, 2.0).is_err());
    }

    #[test]
    fn sde_residual_example2_small() {
        for tau in [0.2, 1.0, 3.0, 6.0] {
            let p = e2_path(tau);
            let r = sde_residual(&p, tau).unwrap();
            let e = stoch_exponential(&p, tau).unwrap();
            assert!(r.abs() <= 1e-9 * e.max(1.0), "tau={tau}: {r}");
            // before the jump the exponential is exp(-(e^t - 1)); residual still zero
            let r_mid = sde_residual(&p, tau / 2.0).unwrap();
            assert!(r_mid.abs() <= 1e-9);
        }
    }

    #[test]
    fn sde_residual_detects_wrong_drift() {
        // a linear drift is not a compensator here, but the SDE identity is pathwise
        // and must still hold: E solves dE = E_- dM for any finite-variation M.
        let p = JumpPath::<f64>::new(
            2.0,
            vec![Jump { t: 0.7, dm: 1.5 }],
            Drift::Linear { slope: -0.8 },
            ContQv::Zero,
        )
        .unwrap();
        assert!(sde_residual(&p, 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn jacod_examples() {
        let v = jacod_functional(&single_jump(0.0), 1.0).unwrap();
        assert_eq!(v.log_value, 0.0);
        assert_eq!(v.value(), 1.0);
        let e = std::f64::consts::E;
        let v = jacod_functional(&single_jump(e - 1.0), 1.0).unwrap();
        assert!((v.log_value - 1.0 / e).abs() < 1e-15);
    }

    #[test]
    fn protter_shimbo_examples() {
        let m = example2_model::<f64>();
        let tau = 1.3;
        let p = e2_path(tau);
        let v = protter_shimbo_functional(&m, &p, tau).unwrap();
        assert!((v.log_value - 0.5 * ((2.0 * tau).exp() - 1.0)).abs() < 1e-13);
        let p1 = single_jump(0.2);
        assert!(matches!(
            protter_shimbo_functional(&example1_model(), &p1, 1.0),
            Err(Error::UnsupportedModel { .. })
        ));
        let zero = JumpPath::<f64>::constant(1.0).unwrap();
        let m = example2_model::<f64>();
        let v = protter_shimbo_functional(&m, &zero, 0.0).unwrap();
        assert_eq!(v.value(), 1.0);
    }

    #[test]
    fn lepingle_memin_examples() {
        assert_eq!(lepingle_memin_a(&single_jump(0.0), 1.0).unwrap(), 0.0);
        let v = lepingle_memin_a(&single_jump(1.0), 1.0).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((v - 0.38629).abs() < 1e-5);
    }

    #[test]
    fn theorem1_reduces_to_jacod_with_zero_control() {
        let a = PredictableControl::zero();
        for xi in [-0.9, 0.0, 0.7] {
            let p = single_jump(xi);
            let j = jacod_functional(&p, 1.0).unwrap();
            let t = theorem1_functional(&p, &a, 0.5, 1.0).unwrap();
            assert_eq!(j.log_value.to_bits(), t.log_value.to_bits());
        }
    }

    #[test]
    fn theorem1_example1_unit_control() {
        let a = PredictableControl::one();
        for xi in [-0.9, -0.2, 0.0, 0.4, 0.95] {
            let v = theorem1_functional(&single_jump(xi), &a, 0.5, 1.0).unwrap();
            let oracle = (1.0 + xi) * (1.0 + xi) * (-xi / (1.0 + xi)).exp();
            assert!(
                (v.value() - oracle).abs() < 1e-14 * oracle.max(1.0),
                "xi={xi}"
            );
        }
    }

    #[test]
    fn theorem1_example2_unit_control() {
        let a = PredictableControl::one();
        for tau in [0.1, 1.0, 2.5] {
            let p = e2_path(tau);
            let e = tau.exp();
            let oracle = e - (e - 1.0) + (1.0 + e).ln() - e / (1.0 + e) + (1.0 + e).ln() - e;
            let v = theorem1_functional(&p, &a, 0.5, tau).unwrap();
            assert!(
                (v.log_value - oracle).abs() < 1e-12 * oracle.abs().max(1.0),
                "tau={tau}"
            );
        }
    }

    #[test]
    fn theorem1_epsilon_term_uses_indicator() {
        let p =
            JumpPath::<f64>::new(1.0, vec![], Drift::Zero, ContQv::Linear { rate: 2.0 }).unwrap();
        // a = 0.9: 1 - a = 0.1 < ε = 0.5 ⇒ ε-term fires
        let a = PredictableControl::constant(0.9).unwrap();
        let v = theorem1_functional(&p, &a, 0.5, 1.0).unwrap().log_value;
        assert!((v - ((0.5 - 0.9) * 2.0 + 0.5 * 2.0)).abs() < 1e-15);
        // a = 0.2: indicator off
        let a = PredictableControl::constant(0.2).unwrap();
        let v = theorem1_functional(&p, &a, 0.5, 1.0).unwrap().log_value;
        assert!((v - (0.3 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn theorem1_rejects_bad_epsilon() {
        let p = single_jump(0.1);
        for eps in [0.0, 1.0, -0.5, 2.0] {
            assert!(matches!(
                theorem1_functional(&p, &PredictableControl::one(), eps, 1.0),
                Err(Error::EpsilonOutOfRange(_))
            ));
        }
    }

    #[test]
    fn lemma1_examples() {
        assert_eq!(
            lemma1_functional(&JumpPath::<f64>::constant(1.0).unwrap(), 1.0).unwrap(),
            0.0
        );
        for xi in [-0.8, 0.3] {
            let v = lemma1_functional(&single_jump(xi), 1.0).unwrap();
            let oracle = (1.0 + xi) * ((1.0 + xi).ln() - xi / (1.0 + xi));
            assert!((v - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn huge_jumps_stay_finite_in_log_space() {
        let p = e2_path(700.0);
        let l = log_stoch_exponential(&p, 700.0).unwrap();
        assert!(l.is_finite() && l < -1e300);
        assert!(jacod_functional(&p, 700.0).unwrap().finite);
        let v = theorem1_functional(&p, &PredictableControl::constant(0.5).unwrap(), 0.5, 700.0)
            .unwrap();
        assert!(v.finite);
        assert!(lepingle_memin_a(&p, 700.0).unwrap().is_finite());
    }

    #[test]
    fn spec_validation() {
        assert!(ConditionSpec::<f64>::new(ConditionKind::Theorem1, None, None).is_err());
        assert!(ConditionSpec::new(
            ConditionKind::Jacod,
            Some(PredictableControl::<f64>::one()),
            None
        )
        .is_err());
        assert!(ConditionSpec::<f64>::new(ConditionKind::Jacod, None, Some(0.5)).is_err());
        let s = ConditionSpec::theorem1(PredictableControl::<f64>::one(), None).unwrap();
        assert_eq!(s.epsilon(), Some(0.5));
        assert!(ConditionSpec::theorem1(PredictableControl::<f64>::one(), Some(1.0)).is_err());
        assert_eq!(
            "protter-shimbo".parse::<ConditionKind>().unwrap(),
            ConditionKind::ProtterShimbo
        );
    }

    #[test]
    fn single_precision_exponential() {
        let p = JumpPath::<f32>::new(
            1.0,
            vec![Jump { t: 1.0, dm: 0.5 }],
            Drift::Zero,
            ContQv::Zero,
        )
        .unwrap();
        assert!((stoch_exponential(&p, 1.0).unwrap() - 1.5).abs() < 1e-6);
    }
}
