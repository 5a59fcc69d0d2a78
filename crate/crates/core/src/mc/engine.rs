use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::distributions::InverseCdfDistribution;
use crate::error::{Error, Result};
use crate::paths::{open_uniform, stream_rng, JumpPath, ProcessModel, SampledPath};
use crate::quadrature::Upper;
use crate::scalar::{pairwise_sum, Scalar};
use crate::stochexp::ConditionSpec;

/// Largest tolerated share of non-finite samples.
pub const MAX_NONFINITE_FRACTION: f64 = 1e-3;

/// Seed and number of independent random streams.
///
/// Paths are split into `streams` contiguous blocks, block `k` drawn from
/// stream `k` of the seeded ChaCha8 generator. Results depend on
/// `(seed, streams, n)` only, never on the number of worker threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub streams: usize,
}

impl SeedSpec {
    pub fn new(seed: u64, streams: usize) -> Result<Self> {
        if streams == 0 {
            return Err(Error::InvalidSampling(
                "at least one stream is required".into(),
            ));
        }
        Ok(Self { seed, streams })
    }

    fn block(&self, k: usize, n: usize) -> std::ops::Range<usize> {
        (k * n / self.streams)..((k + 1) * n / self.streams)
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            streams: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub se: T,
    /// Finite samples used.
    pub n: usize,
    pub nonfinite: usize,
    /// Paths on which a driver hit the model's cap.
    pub capped: usize,
}

/// How driver values are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampling {
    /// Straight from each driver's law.
    Direct,
    /// Drivers with bounded support are drawn from `(1 - weight) law + weight uniform`
    /// and every sample carries its likelihood ratio. Keeps integrands that blow
    /// up where the law is thin at finite variance.
    Defensive { weight: f64 },
}

impl Sampling {
    pub fn defensive(weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::InvalidSampling(format!(
                "mixture weight must lie in (0, 1), got {weight}"
            )));
        }
        Ok(Sampling::Defensive { weight })
    }

    /// Draws one path and its log likelihood ratio.
    fn draw<T, M, R>(
        &self,
        model: &M,
        drivers: &[InverseCdfDistribution<T>],
        rng: &mut R,
    ) -> (SampledPath<T>, T)
    where
        T: Scalar,
        M: ProcessModel<T>,
        R: Rng + ?Sized,
    {
        let w = match *self {
            Sampling::Direct => return (model.sample_path(rng), T::zero()),
            Sampling::Defensive { weight } => weight,
        };
        let mut log_w = T::zero();
        let xs: Vec<T> = drivers
            .iter()
            .map(|d| match d.support() {
                (lo, Upper::Finite(hi)) => {
                    let mix: f64 = rng.random();
                    let u: T = open_uniform(rng);
                    let x = if mix < w {
                        lo + (hi - lo) * u
                    } else {
                        d.inverse_cdf(u)
                    };
                    let lf = d.log_density(x);
                    let a = T::of((1.0 - w).ln()) + lf;
                    let b = T::of(w.ln()) - (hi - lo).ln();
                    let (big, small) = if a > b { (a, b) } else { (b, a) };
                    log_w = log_w + lf - (big + (small - big).exp().ln_1p());
                    x
                }
                _ => d.inverse_cdf(open_uniform(rng)),
            })
            .collect();
        let path = model
            .build_path(&xs)
            .expect("mixture draws lie in the driver supports");
        (path, log_w)
    }
}

fn run_blocks<T, M, F>(
    model: &M,
    k: usize,
    n: usize,
    seeds: SeedSpec,
    sampling: Sampling,
    functional: F,
) -> Result<Vec<Estimate<T>>>
where
    T: Scalar,
    M: ProcessModel<T>,
    F: Fn(&JumpPath<T>, T, &mut [T]) + Sync,
{
    if n < 2 {
        return Err(Error::InvalidSampling(format!(
            "need n >= 2 paths, got {n}"
        )));
    }
    if seeds.streams == 0 {
        return Err(Error::InvalidSampling(
            "at least one stream is required".into(),
        ));
    }
    let drivers = model.drivers();
    let blocks: Vec<(Vec<T>, usize)> = (0..seeds.streams)
        .into_par_iter()
        .map(|s| {
            let range = seeds.block(s, n);
            let mut rng = stream_rng(seeds.seed, s as u64);
            let mut out = vec![T::zero(); range.len() * k];
            let mut capped = 0usize;
            for row in out.chunks_mut(k.max(1)).take(range.len()) {
                let (sampled, log_w) = sampling.draw(model, &drivers, &mut rng);
                capped += usize::from(sampled.capped);
                functional(&sampled.path, log_w, row);
            }
            (out, capped)
        })
        .collect();
    let capped: usize = blocks.iter().map(|b| b.1).sum();

    let mut estimates = Vec::with_capacity(k);
    for col in 0..k {
        let values: Vec<T> = blocks
            .iter()
            .flat_map(|(v, _)| v.iter().skip(col).step_by(k).copied())
            .collect();
        estimates.push(summarize(&values, capped)?);
    }
    Ok(estimates)
}

/// Draws `n` paths and evaluates `k` functionals per path, writing into the
/// output slice; returns one estimate per functional.
pub fn estimate_many<T, M, F>(
    model: &M,
    k: usize,
    functional: F,
    n: usize,
    seeds: SeedSpec,
) -> Result<Vec<Estimate<T>>>
where
    T: Scalar,
    M: ProcessModel<T>,
    F: Fn(&JumpPath<T>, &mut [T]) + Sync,
{
    run_blocks(model, k, n, seeds, Sampling::Direct, |p, _, out| {
        functional(p, out)
    })
}

/// `E[exp(log_functional)]` for `k` log-valued functionals under `sampling`.
pub fn estimate_log_many<T, M, F>(
    model: &M,
    k: usize,
    log_functional: F,
    n: usize,
    seeds: SeedSpec,
    sampling: Sampling,
) -> Result<Vec<Estimate<T>>>
where
    T: Scalar,
    M: ProcessModel<T>,
    F: Fn(&JumpPath<T>, &mut [T]) + Sync,
{
    run_blocks(model, k, n, seeds, sampling, |p, log_w, out| {
        log_functional(p, out);
        for v in out.iter_mut() {
            *v = if log_w == T::neg_infinity() {
                T::zero()
            } else {
                (*v + log_w).exp()
            };
        }
    })
}

fn summarize<T: Scalar>(values: &[T], capped: usize) -> Result<Estimate<T>> {
    let total = values.len();
    let finite: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let nonfinite = total - finite.len();
    if nonfinite as f64 > MAX_NONFINITE_FRACTION * total as f64 || finite.len() < 2 {
        return Err(Error::TooManyNonFinite { nonfinite, total });
    }
    let m = finite.len();
    let mean = pairwise_sum(&finite) / T::of_usize(m);
    let dev: Vec<T> = finite.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / T::of_usize(m - 1);
    Ok(Estimate {
        mean,
        se: (var / T::of_usize(m)).sqrt(),
        n: m,
        nonfinite,
        capped,
    })
}

/// Sample mean and standard error of `functional` over `n` independent paths.
pub fn estimate_expectation<T, M, F>(
    model: &M,
    functional: F,
    n: usize,
    seeds: SeedSpec,
) -> Result<Estimate<T>>
where
    T: Scalar,
    M: ProcessModel<T>,
    F: Fn(&JumpPath<T>) -> T + Sync,
{
    let mut v = estimate_many(model, 1, |p, out| out[0] = functional(p), n, seeds)?;
    Ok(v.remove(0))
}

/// A stopping time in the evaluated family, always capped at the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoppingTime {
    /// `t ∧ T`
    Fixed {
        t: f64,
    },
    /// Time of the `index`-th jump (0-based), `T` when there is none.
    Jump {
        index: usize,
    },
    Horizon,
}

impl StoppingTime {
    fn evaluate<T: Scalar>(&self, path: &JumpPath<T>) -> T {
        let h = path.horizon();
        match *self {
            StoppingTime::Fixed { t } => T::of(t).min(h),
            StoppingTime::Jump { index } => path.jumps().get(index).map_or(h, |j| j.t),
            StoppingTime::Horizon => h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingFamily<T> {
    pub times: Vec<StoppingTime>,
    pub estimates: Vec<Estimate<T>>,
}

impl<T: Scalar> StoppingFamily<T> {
    /// The member with the largest mean.
    pub fn max(&self) -> (StoppingTime, Estimate<T>) {
        let mut best = 0;
        for (i, e) in self.estimates.iter().enumerate() {
            if e.mean > self.estimates[best].mean {
                best = i;
            }
        }
        (self.times[best], self.estimates[best])
    }
}

/// Estimates `E[integrand_σ]` for σ in `{grid ∧ T} ∪ {jump times} ∪ {T}`.
pub fn estimate_stopping_family<T, M>(
    model: &M,
    spec: &ConditionSpec<T>,
    grid: &[f64],
    max_jumps: usize,
    n: usize,
    seeds: SeedSpec,
    sampling: Sampling,
) -> Result<StoppingFamily<T>>
where
    T: Scalar,
    M: ProcessModel<T>,
{
    spec.check_model(model)?;
    let mut times: Vec<StoppingTime> = grid.iter().map(|&t| StoppingTime::Fixed { t }).collect();
    times.extend((0..max_jumps).map(|index| StoppingTime::Jump { index }));
    times.push(StoppingTime::Horizon);
    let estimates = estimate_log_many(
        model,
        times.len(),
        |path, out| {
            for (slot, st) in out.iter_mut().zip(&times) {
                let t = st.evaluate(path);
                *slot = spec.log_integrand(model, path, t).unwrap_or(T::nan());
            }
        },
        n,
        seeds,
        sampling,
    )?;
    Ok(StoppingFamily { times, estimates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{example1_model, example2_model, Example1};
    use crate::stochexp::stoch_exponential;

    #[test]
    fn constant_functional_has_zero_se() {
        let e = estimate_expectation(
            &Example1,
            |_p: &JumpPath<f64>| 1.0,
            1000,
            SeedSpec::default(),
        )
        .unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.se, 0.0);
        assert_eq!(e.n, 1000);
    }

    #[test]
    fn deterministic_per_seed_spec() {
        let run = || {
            estimate_expectation(
                &example1_model(),
                |p: &JumpPath<f64>| p.value_at(1.0),
                10_001,
                SeedSpec::new(7, 5).unwrap(),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.se.to_bits(), b.se.to_bits());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(run);
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn different_seeds_differ() {
        let f = |p: &JumpPath<f64>| p.value_at(1.0);
        let a =
            estimate_expectation(&example1_model(), f, 1000, SeedSpec::new(1, 4).unwrap()).unwrap();
        let b =
            estimate_expectation(&example1_model(), f, 1000, SeedSpec::new(2, 4).unwrap()).unwrap();
        assert_ne!(a.mean, b.mean);
    }

    #[test]
    fn example2_exponential_mean_is_one() {
        let m = example2_model::<f64>();
        let e = estimate_expectation(
            &m,
            |p| stoch_exponential(p, p.horizon()).unwrap(),
            200_000,
            SeedSpec::new(3, 16).unwrap(),
        )
        .unwrap();
        assert!((e.mean - 1.0).abs() <= 4.0 * e.se, "{e:?}");
    }

    #[test]
    fn nonfinite_budget() {
        let f = |p: &JumpPath<f64>| if p.jumps()[0].dm > 0.5 { f64::NAN } else { 0.0 };
        let err =
            estimate_expectation(&example1_model(), f, 10_000, SeedSpec::default()).unwrap_err();
        assert!(matches!(err, Error::TooManyNonFinite { .. }));
        assert!(estimate_expectation(
            &example1_model(),
            |_: &JumpPath<f64>| 0.0,
            1,
            SeedSpec::default()
        )
        .is_err());
        assert!(SeedSpec::new(0, 0).is_err());
    }

    #[test]
    fn stopping_family_lists_members() {
        let m = example2_model::<f64>();
        let spec = ConditionSpec::theorem1(crate::paths::PredictableControl::one(), None).unwrap();
        let fam = estimate_stopping_family(
            &m,
            &spec,
            &[0.5, 1.0],
            1,
            20_000,
            SeedSpec::default(),
            Sampling::Direct,
        )
        .unwrap();
        assert_eq!(fam.times.len(), 4);
        // jump time and horizon coincide for this model
        assert_eq!(fam.estimates[2].mean, fam.estimates[3].mean);
        let (_, best) = fam.max();
        assert!(best.mean >= fam.estimates[0].mean);
    }

    #[test]
    fn defensive_mixture_is_unbiased() {
        let m = example1_model();
        let seeds = SeedSpec::new(5, 8).unwrap();
        let e = estimate_log_many(
            &m,
            1,
            |p: &JumpPath<f64>, out| out[0] = p.jumps()[0].dm.ln_1p(),
            200_000,
            seeds,
            Sampling::defensive(0.2).unwrap(),
        )
        .unwrap();
        assert!((e[0].mean - 1.0).abs() <= 4.0 * e[0].se, "{:?}", e[0]);
        assert!(Sampling::defensive(0.0).is_err());
        assert!(Sampling::defensive(1.0).is_err());
    }

    #[test]
    fn defensive_mixture_tames_left_tail() {
        // (1+ξ)² e^{-ξ/(1+ξ)} has infinite variance under the law of ξ
        let m = example1_model();
        let log_g = |p: &JumpPath<f64>, out: &mut [f64]| {
            let x = p.jumps()[0].dm;
            out[0] = 2.0 * x.ln_1p() - x / (1.0 + x);
        };
        let e = estimate_log_many(
            &m,
            1,
            log_g,
            200_000,
            SeedSpec::new(1, 8).unwrap(),
            Sampling::defensive(0.1).unwrap(),
        )
        .unwrap();
        assert!(
            (e[0].mean - 1.248740710242008).abs() <= 4.0 * e[0].se,
            "{:?}",
            e[0]
        );
        assert!(e[0].se < 0.01);
    }
}
