use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    make_eta_distribution, make_first_jump_time, make_xi_distribution, InverseCdfDistribution,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::Scalar;

use super::{ContQv, Drift, Jump, JumpPath};

/// Cap on exponential waiting times; `e^{700}` is still representable in `f64`.
pub const DEFAULT_TAU_CAP: f64 = 700.0;

/// A sampled path, flagged when a driver had to be capped.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<T> {
    pub path: JumpPath<T>,
    pub capped: bool,
}

/// Rng for path `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a uniform in the open unit interval, representable in `T`.
pub fn open_uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u: f64 = rng.sample(Open01);
    let v = T::of(u);
    if v >= T::one() {
        T::one() - T::epsilon() * T::half()
    } else if v <= T::zero() {
        T::min_positive_value()
    } else {
        v
    }
}

/// A law on paths: independent scalar drivers mapped deterministically to a path.
pub trait ProcessModel<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Independent scalar laws whose realizations determine the path.
    fn drivers(&self) -> Vec<InverseCdfDistribution<T>>;

    /// Builds the path for one realization of the drivers, applying caps.
    fn build_path(&self, drivers: &[T]) -> Result<SampledPath<T>>;

    /// Closed-form `⟨M^d⟩_t` along `path`, when the model carries one.
    fn disc_qv(&self, _path: &JumpPath<T>, _t: T) -> Result<T> {
        Err(Error::UnsupportedModel {
            model: self.name().into(),
            what: "a closed-form ⟨M^d⟩".into(),
        })
    }

    /// Compensator `B_t` of the Lepingle–Mémin process along `path`.
    fn lm_compensator(&self, _path: &JumpPath<T>, _t: T) -> Result<T> {
        Err(Error::UnsupportedModel {
            model: self.name().into(),
            what: "a Lepingle–Mémin compensator".into(),
        })
    }

    fn has_disc_qv(&self) -> bool {
        false
    }

    fn has_lm_compensator(&self) -> bool {
        false
    }

    fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledPath<T>
    where
        Self: Sized,
    {
        let xs: Vec<T> = self
            .drivers()
            .iter()
            .map(|d| d.inverse_cdf(open_uniform(rng)))
            .collect();
        self.build_path(&xs)
            .expect("inverse-CDF draws lie in the driver supports")
    }

    /// Deterministic in `(seed, stream)`.
    fn sample_seeded(&self, seed: u64, stream: u64) -> SampledPath<T>
    where
        Self: Sized,
    {
        self.sample_path(&mut stream_rng(seed, stream))
    }
}

fn expect_drivers<T>(name: &str, xs: &[T], n: usize) -> Result<()> {
    if xs.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidSampling(format!(
            "{name} takes {n} driver value(s), got {}",
            xs.len()
        )))
    }
}

/// `M_t = ξ 1_{t >= 1}`: one jump of size `ξ` at `t = 1`, observed on `[0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

/// `M_t = ∫_0^t e^s dN_{s∧τ₁}` for a unit Poisson martingale stopped at its first jump.
#[derive(Debug, Clone, Copy)]
pub struct Example2<T> {
    pub tau_cap: T,
}

/// `M_t = η 1_{t >= 1} + ∫_1^t e^{s-1} dN̂_{s∧τ̂₁}` with `η` independent of the Poisson part.
#[derive(Debug, Clone, Copy)]
pub struct Example3<T> {
    pub tau_cap: T,
}

impl<T: Scalar> Default for Example2<T> {
    fn default() -> Self {
        Self {
            tau_cap: T::of(DEFAULT_TAU_CAP),
        }
    }
}

impl<T: Scalar> Default for Example3<T> {
    fn default() -> Self {
        Self {
            tau_cap: T::of(DEFAULT_TAU_CAP),
        }
    }
}

pub fn example1_model() -> Example1 {
    Example1
}

pub fn example2_model<T: Scalar>() -> Example2<T> {
    Example2::default()
}

pub fn example3_model<T: Scalar>() -> Example3<T> {
    Example3::default()
}

impl<T: Scalar> ProcessModel<T> for Example1 {
    fn name(&self) -> &'static str {
        "example1"
    }

    fn description(&self) -> &'static str {
        "one jump ξ at t = 1, ξ with density f on (-1, 1)"
    }

    fn drivers(&self) -> Vec<InverseCdfDistribution<T>> {
        vec![make_xi_distribution()]
    }

    fn build_path(&self, xs: &[T]) -> Result<SampledPath<T>> {
        expect_drivers("example1", xs, 1)?;
        let path = JumpPath::new(
            T::one(),
            vec![Jump {
                t: T::one(),
                dm: xs[0],
            }],
            Drift::Zero,
            ContQv::Zero,
        )?;
        Ok(SampledPath {
            path,
            capped: false,
        })
    }
}

fn lm_integrand<T: Scalar>(s: T) -> T {
    let e = s.exp();
    (T::one() + e) * e.ln_1p() - e
}

impl<T: Scalar> ProcessModel<T> for Example2<T> {
    fn name(&self) -> &'static str {
        "example2"
    }

    fn description(&self) -> &'static str {
        "compensated Poisson integral of e^s stopped at the first jump τ₁"
    }

    fn drivers(&self) -> Vec<InverseCdfDistribution<T>> {
        vec![make_first_jump_time()]
    }

    fn build_path(&self, xs: &[T]) -> Result<SampledPath<T>> {
        expect_drivers("example2", xs, 1)?;
        let capped = xs[0] > self.tau_cap;
        let tau = xs[0].min(self.tau_cap).max(T::min_positive_value());
        let path = JumpPath::new(
            tau,
            vec![Jump {
                t: tau,
                dm: tau.exp(),
            }],
            Drift::CompensatedExp { start: T::zero() },
            ContQv::Zero,
        )?;
        Ok(SampledPath { path, capped })
    }

    /// `∫_0^{t∧τ₁} e^{2s} ds`
    fn disc_qv(&self, path: &JumpPath<T>, t: T) -> Result<T> {
        let s = t.min(path.horizon());
        Ok(T::half() * (T::two() * s).exp_m1())
    }

    /// `∫_0^{t∧τ₁} ((1 + e^s) ln(1 + e^s) - e^s) ds`, by quadrature.
    fn lm_compensator(&self, path: &JumpPath<T>, t: T) -> Result<T> {
        let s = t.min(path.horizon());
        Ok(integrate(lm_integrand, T::zero(), s, &QuadratureOptions::default())?.value)
    }

    fn has_disc_qv(&self) -> bool {
        true
    }

    fn has_lm_compensator(&self) -> bool {
        true
    }
}

impl<T: Scalar> ProcessModel<T> for Example3<T> {
    fn name(&self) -> &'static str {
        "example3"
    }

    fn description(&self) -> &'static str {
        "jump η at t = 1 plus compensated Poisson integral of e^{s-1} from t = 1, stopped at τ̂₁"
    }

    /// `η` and the waiting time `τ̂₁ - 1` of the Poisson process restarted at 1.
    fn drivers(&self) -> Vec<InverseCdfDistribution<T>> {
        vec![make_eta_distribution(), make_first_jump_time()]
    }

    fn build_path(&self, xs: &[T]) -> Result<SampledPath<T>> {
        expect_drivers("example3", xs, 2)?;
        let capped = xs[1] > self.tau_cap;
        let wait = xs[1].min(self.tau_cap);
        // keep τ̂₁ strictly after the jump at 1 even when the wait rounds away
        let tau = (T::one() + wait).max(T::one() + T::epsilon());
        let path = JumpPath::new(
            tau,
            vec![
                Jump {
                    t: T::one(),
                    dm: xs[0],
                },
                Jump {
                    t: tau,
                    dm: (tau - T::one()).exp(),
                },
            ],
            Drift::CompensatedExp { start: T::one() },
            ContQv::Zero,
        )?;
        Ok(SampledPath { path, capped })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Example1,
    Example2,
    Example3,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::Example1,
        ModelKind::Example2,
        ModelKind::Example3,
    ];

    pub fn build<T: Scalar>(self) -> ExampleModel<T> {
        match self {
            ModelKind::Example1 => ExampleModel::Example1(Example1),
            ModelKind::Example2 => ExampleModel::Example2(Example2::default()),
            ModelKind::Example3 => ExampleModel::Example3(Example3::default()),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Example1 => "example1",
            ModelKind::Example2 => "example2",
            ModelKind::Example3 => "example3",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "example1" | "1" => Ok(ModelKind::Example1),
            "example2" | "2" => Ok(ModelKind::Example2),
            "example3" | "3" => Ok(ModelKind::Example3),
            other => Err(Error::Parse(format!("unknown model '{other}'"))),
        }
    }
}

/// The three worked examples behind one type.
#[derive(Debug, Clone, Copy)]
pub enum ExampleModel<T> {
    Example1(Example1),
    Example2(Example2<T>),
    Example3(Example3<T>),
}

impl<T: Scalar> ExampleModel<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            ExampleModel::Example1(_) => ModelKind::Example1,
            ExampleModel::Example2(_) => ModelKind::Example2,
            ExampleModel::Example3(_) => ModelKind::Example3,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            ExampleModel::Example1($m) => $e,
            ExampleModel::Example2($m) => $e,
            ExampleModel::Example3($m) => $e,
        }
    };
}

impl<T: Scalar> ProcessModel<T> for ExampleModel<T> {
    fn name(&self) -> &'static str {
        dispatch!(self, m => ProcessModel::<T>::name(m))
    }

    fn description(&self) -> &'static str {
        dispatch!(self, m => ProcessModel::<T>::description(m))
    }

    fn drivers(&self) -> Vec<InverseCdfDistribution<T>> {
        dispatch!(self, m => m.drivers())
    }

    fn build_path(&self, xs: &[T]) -> Result<SampledPath<T>> {
        dispatch!(self, m => m.build_path(xs))
    }

    fn disc_qv(&self, path: &JumpPath<T>, t: T) -> Result<T> {
        dispatch!(self, m => m.disc_qv(path, t))
    }

    fn lm_compensator(&self, path: &JumpPath<T>, t: T) -> Result<T> {
        dispatch!(self, m => m.lm_compensator(path, t))
    }

    fn has_disc_qv(&self) -> bool {
        dispatch!(self, m => ProcessModel::<T>::has_disc_qv(m))
    }

    fn has_lm_compensator(&self) -> bool {
        dispatch!(self, m => ProcessModel::<T>::has_lm_compensator(m))
    }
}
