//! Realized càdlàg trajectories of finite-activity jump martingales.
//!
//! A [`JumpPath`] is stored exactly: an ordered jump list, a closed-form
//! finite-variation drift between jumps, and a closed-form continuous
//! quadratic variation `⟨M^c⟩`. Nothing is discretized, so identities that
//! hold pathwise can be checked to rounding error.

mod control;
mod models;

pub use control::{integrate_control, PredictableControl};
pub use models::{
    example1_model, example2_model, example3_model, open_uniform, stream_rng, Example1, Example2,
    Example3, ExampleModel, ModelKind, ProcessModel, SampledPath, DEFAULT_TAU_CAP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump<T> {
    pub t: T,
    pub dm: T,
}

/// Continuous finite-variation part of a path, as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Drift<T> {
    Zero,
    /// `slope * t`
    Linear {
        slope: T,
    },
    /// `-(e^{t - start} - 1)` for `t > start`, zero before: the compensator
    /// term of `∫ e^{s - start} dN_s` for a unit-rate Poisson process `N`.
    CompensatedExp {
        start: T,
    },
}

impl<T: Scalar> Drift<T> {
    pub fn value(&self, t: T) -> T {
        match *self {
            Drift::Zero => T::zero(),
            Drift::Linear { slope } => slope * t,
            Drift::CompensatedExp { start } => {
                if t <= start {
                    T::zero()
                } else {
                    -(t - start).exp_m1()
                }
            }
        }
    }

    /// Time derivative, one-sided from the right at kinks.
    pub fn rate(&self, t: T) -> T {
        match *self {
            Drift::Zero => T::zero(),
            Drift::Linear { slope } => slope,
            Drift::CompensatedExp { start } => {
                if t < start {
                    T::zero()
                } else {
                    -(t - start).exp()
                }
            }
        }
    }

    /// Points where the drift is not smooth.
    pub fn kinks(&self) -> Vec<T> {
        match *self {
            Drift::CompensatedExp { start } => vec![start],
            _ => Vec::new(),
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Drift::Zero => true,
            Drift::Linear { slope } => slope.is_finite(),
            Drift::CompensatedExp { start } => start.is_finite() && start >= T::zero(),
        }
    }

    fn cast<U: Scalar>(&self) -> Drift<U> {
        match *self {
            Drift::Zero => Drift::Zero,
            Drift::Linear { slope } => Drift::Linear {
                slope: U::of(slope.as_f64()),
            },
            Drift::CompensatedExp { start } => Drift::CompensatedExp {
                start: U::of(start.as_f64()),
            },
        }
    }
}

/// Continuous-part quadratic variation `t ↦ ⟨M^c⟩_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContQv<T> {
    Zero,
    /// `rate * t`
    Linear {
        rate: T,
    },
}

impl<T: Scalar> ContQv<T> {
    pub fn value(&self, t: T) -> T {
        match *self {
            ContQv::Zero => T::zero(),
            ContQv::Linear { rate } => rate * t,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            ContQv::Zero => true,
            ContQv::Linear { rate } => rate == T::zero(),
        }
    }

    fn cast<U: Scalar>(&self) -> ContQv<U> {
        match *self {
            ContQv::Zero => ContQv::Zero,
            ContQv::Linear { rate } => ContQv::Linear {
                rate: U::of(rate.as_f64()),
            },
        }
    }
}

/// One realized trajectory observed up to its (random) horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath<T> {
    horizon: T,
    jumps: Vec<Jump<T>>,
    drift: Drift<T>,
    cont_qv: ContQv<T>,
}

impl<T: Scalar> JumpPath<T> {
    pub fn new(
        horizon: T,
        jumps: Vec<Jump<T>>,
        drift: Drift<T>,
        cont_qv: ContQv<T>,
    ) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= T::zero()) {
            return Err(Error::InvalidPath(format!(
                "horizon {horizon} must be finite and >= 0"
            )));
        }
        if !drift.is_valid() {
            return Err(Error::InvalidPath(format!("invalid drift {drift:?}")));
        }
        if let ContQv::Linear { rate } = cont_qv {
            if !(rate.is_finite() && rate >= T::zero()) {
                return Err(Error::InvalidPath(format!(
                    "⟨M^c⟩ rate {rate} must be >= 0"
                )));
            }
        }
        let mut prev = T::zero();
        for (i, j) in jumps.iter().enumerate() {
            if !(j.t > prev && j.t <= horizon) {
                return Err(Error::InvalidPath(format!(
                    "jump times must be strictly increasing in (0, horizon]; got t = {} at index {i}",
                    j.t
                )));
            }
            if !(j.dm > -T::one()) || !j.dm.is_finite() {
                return Err(Error::JumpTooSmall {
                    time: j.t.as_f64(),
                    size: j.dm.as_f64(),
                });
            }
            prev = j.t;
        }
        Ok(Self {
            horizon,
            jumps,
            drift,
            cont_qv,
        })
    }

    /// A path with no jumps, no drift and no continuous part.
    pub fn constant(horizon: T) -> Result<Self> {
        Self::new(horizon, Vec::new(), Drift::Zero, ContQv::Zero)
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn jumps(&self) -> &[Jump<T>] {
        &self.jumps
    }

    pub fn drift(&self) -> Drift<T> {
        self.drift
    }

    pub fn cont_qv(&self) -> ContQv<T> {
        self.cont_qv
    }

    pub fn check_time(&self, t: T) -> Result<()> {
        if t >= T::zero() && t <= self.horizon {
            Ok(())
        } else {
            Err(Error::BeyondHorizon {
                t: t.as_f64(),
                horizon: self.horizon.as_f64(),
            })
        }
    }

    /// Jumps with `t_i <= t`.
    pub fn jumps_until(&self, t: T) -> &[Jump<T>] {
        let n = self.jumps.partition_point(|j| j.t <= t);
        &self.jumps[..n]
    }

    /// Jumps with `t_i < t`.
    pub fn jumps_before(&self, t: T) -> &[Jump<T>] {
        let n = self.jumps.partition_point(|j| j.t < t);
        &self.jumps[..n]
    }

    /// Drift frozen at the horizon.
    pub fn drift_at(&self, t: T) -> T {
        self.drift.value(t.min(self.horizon))
    }

    pub fn cont_qv_at(&self, t: T) -> T {
        self.cont_qv.value(t.min(self.horizon).max(T::zero()))
    }

    /// `M_t = drift(t) + Σ_{t_i <= t} ΔM_i`.
    pub fn value_at(&self, t: T) -> T {
        let mut acc = CompensatedSum::new();
        acc.add(self.drift_at(t));
        acc.extend(self.jumps_until(t).iter().map(|j| j.dm));
        acc.value()
    }

    /// Left limit `M_{t-}`.
    pub fn left_value_at(&self, t: T) -> T {
        let mut acc = CompensatedSum::new();
        acc.add(self.drift_at(t));
        acc.extend(self.jumps_before(t).iter().map(|j| j.dm));
        acc.value()
    }

    /// Boundaries of the intervals on which the path is smooth, within `[0, t]`.
    pub fn smooth_breaks(&self, t: T) -> Vec<T> {
        let mut pts = vec![T::zero()];
        pts.extend(self.jumps_until(t).iter().map(|j| j.t));
        pts.extend(
            self.drift
                .kinks()
                .into_iter()
                .filter(|&k| k > T::zero() && k < t),
        );
        pts.push(t);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        pts.dedup();
        pts
    }

    pub fn to_document(&self) -> PathDocument {
        PathDocument {
            horizon: self.horizon.as_f64(),
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    t: j.t.as_f64(),
                    dm: j.dm.as_f64(),
                })
                .collect(),
            drift_kind: self.drift.cast(),
            cont_qv_kind: self.cont_qv.cast(),
        }
    }

    pub fn from_document(doc: &PathDocument) -> Result<Self> {
        Self::new(
            T::of(doc.horizon),
            doc.jumps
                .iter()
                .map(|j| Jump {
                    t: T::of(j.t),
                    dm: T::of(j.dm),
                })
                .collect(),
            doc.drift_kind.cast(),
            doc.cont_qv_kind.cast(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("path document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PathDocument = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// JSON form of a path: `{horizon, jumps: [{t, dm}], drift_kind, cont_qv_kind}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDocument {
    pub horizon: f64,
    pub jumps: Vec<Jump<f64>>,
    pub drift_kind: Drift<f64>,
    pub cont_qv_kind: ContQv<f64>,
}
