use serde::Serialize;

use crate::distributions::{InverseCdfDistribution, Law};
use crate::error::{Error, Result};
use crate::paths::{JumpPath, ProcessModel};
use crate::scalar::Scalar;
use crate::stochexp::{ConditionKind, ConditionSpec};

use super::divergence::{detect_divergence, DivergenceEvidence, GrowthModel};
use super::engine::{estimate_log_many, estimate_stopping_family, Estimate, Sampling, SeedSpec};
use super::expectation::{quadrature_log_expectation, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Finite,
    Diverging,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the expectation was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// One-dimensional quadrature over a single driver.
    Quadrature,
    /// Product of one-dimensional quadratures over independent drivers.
    SeparableQuadrature,
    /// Monte Carlo over the stopping-time family only.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl<T: Scalar> From<Estimate<T>> for EstimateSummary {
    fn from(e: Estimate<T>) -> Self {
        Self {
            mean: e.mean.as_f64(),
            se: e.se.as_f64(),
            n: e.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceSummary {
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub model: GrowthModel,
}

impl<T: Scalar> From<&DivergenceEvidence<T>> for DivergenceSummary {
    fn from(e: &DivergenceEvidence<T>) -> Self {
        Self {
            levels: e.levels.iter().map(|v| v.as_f64()).collect(),
            values: e.values.iter().map(|v| v.as_f64()).collect(),
            slope: e.slope.as_f64(),
            model: e.model,
        }
    }
}

/// One condition's verdict. Serializes to
/// `{condition, verdict, estimate: {mean, se, n}, divergence: {levels, values, slope, model}, quadrature}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub estimate: Option<EstimateSummary>,
    pub divergence: Option<DivergenceSummary>,
    pub quadrature: Option<f64>,
    #[serde(skip)]
    pub route: Route,
    #[serde(skip)]
    pub r_squared: Option<f64>,
    #[serde(skip)]
    pub seed: u64,
}

impl ConditionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `(level, value)` rows of the divergence ladder, with the condition,
    /// seed and growth model repeated on every row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["condition", "seed", "model", "level", "value"])
            .expect("in-memory csv");
        if let Some(d) = &self.divergence {
            for (l, v) in d.levels.iter().zip(&d.values) {
                w.write_record([
                    self.condition.clone(),
                    self.seed.to_string(),
                    d.model.as_str().to_string(),
                    format!("{l:e}"),
                    format!("{v:e}"),
                ])
                .expect("in-memory csv");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 fields")
    }
}

/// A ladder of truncations of one driver law.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationFamily<T> {
    pub levels: Vec<T>,
    pub model: GrowthModel,
    pub lower_gap: bool,
}

impl<T: Scalar> TruncationFamily<T> {
    pub fn truncation(&self, level: T) -> Truncation<T> {
        if self.lower_gap {
            Truncation::LowerGap(level)
        } else {
            Truncation::Upper(level)
        }
    }
}

/// Default truncation ladder for a driver law.
///
/// ξ approaches −1 through gaps `δ`; the exponential and η are capped from
/// above. The compensator-based criteria grow super-exponentially in the
/// exponential time, so their ladder stays below the overflow threshold.
pub fn default_family<T: Scalar>(law: Law, kind: ConditionKind) -> TruncationFamily<T> {
    let lv = |xs: &[f64]| xs.iter().map(|&x| T::of(x)).collect::<Vec<T>>();
    match law {
        Law::Xi => TruncationFamily {
            levels: lv(&[1e-2, 1e-3, 1e-4, 1e-5]),
            model: GrowthModel::Log,
            lower_gap: true,
        },
        Law::UnitExponential => TruncationFamily {
            levels: match kind {
                ConditionKind::ProtterShimbo | ConditionKind::LepingleMemin => {
                    lv(&[1.0, 2.0, 3.0, 3.5])
                }
                _ => lv(&[10.0, 20.0, 40.0, 80.0]),
            },
            model: GrowthModel::Linear,
            lower_gap: false,
        },
        Law::Eta => TruncationFamily {
            levels: lv(&[1e2, 1e4, 1e6, 1e8]),
            model: GrowthModel::Log,
            lower_gap: false,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationOptions<T> {
    pub seeds: SeedSpec,
    /// Monte Carlo sample count; below 2 skips Monte Carlo.
    pub n: usize,
    /// Overrides the default ladder of every driver.
    pub levels: Option<Vec<T>>,
    /// Fixed times for the Monte Carlo stopping family.
    pub grid: Vec<f64>,
    pub sampling: Sampling,
}

impl<T: Scalar> EvaluationOptions<T> {
    pub fn new(seeds: SeedSpec, n: usize) -> Self {
        Self {
            seeds,
            n,
            levels: None,
            grid: vec![0.5, 1.0, 2.0],
            sampling: Sampling::Defensive { weight: 0.1 },
        }
    }
}

/// Relative size of `L(x, y) - L(x, r₂) - L(r₁, y) + L(r₁, r₂)` tolerated
/// before a two-driver integrand is declared non-separable.
const SEPARABILITY_TOL: f64 = 1e-9;

struct Factor<'a, T> {
    dist: InverseCdfDistribution<T>,
    log_integrand: Box<dyn Fn(T) -> T + Sync + 'a>,
}

fn path_log_integrand<T: Scalar, M: ProcessModel<T>>(
    model: &M,
    spec: &ConditionSpec<T>,
    xs: &[T],
) -> T {
    model
        .build_path(xs)
        .and_then(|s| spec.log_integrand(model, &s.path, s.path.horizon()))
        .unwrap_or(T::nan())
}

/// Pulls a quadrature node off the closed end of a driver's support.
fn interior<T: Scalar>(dist: &InverseCdfDistribution<T>, x: T) -> T {
    let (lo, _) = dist.support();
    let floor = lo + T::epsilon() * lo.abs().max(T::one());
    x.max(floor)
}

fn separable_factors<'a, T: Scalar, M: ProcessModel<T>>(
    model: &'a M,
    spec: &'a ConditionSpec<T>,
) -> Option<Vec<Factor<'a, T>>> {
    let drivers = model.drivers();
    match drivers.len() {
        1 => {
            let d = drivers[0];
            Some(vec![Factor {
                dist: d,
                log_integrand: Box::new(move |x| {
                    path_log_integrand(model, spec, &[interior(&d, x)])
                }),
            }])
        }
        2 => {
            let (d1, d2) = (drivers[0], drivers[1]);
            let (r1, r2) = (d1.median(), d2.median());
            let l = move |x: T, y: T| {
                path_log_integrand(model, spec, &[interior(&d1, x), interior(&d2, y)])
            };
            let base = l(r1, r2);
            if !base.is_finite() {
                return None;
            }
            let probes = [T::of(0.05), T::of(0.3), T::of(0.7), T::of(0.95)];
            for &u in &probes {
                for &v in &probes {
                    let (x, y) = (d1.inverse_cdf(u), d2.inverse_cdf(v));
                    let (lxy, lx, ly) = (l(x, y), l(x, r2), l(r1, y));
                    let cross = lxy - lx - ly + base;
                    let scale = lxy.abs().max(lx.abs()).max(ly.abs()).max(T::one());
                    if !(cross.abs() <= T::of(SEPARABILITY_TOL) * scale) {
                        return None;
                    }
                }
            }
            Some(vec![
                Factor {
                    dist: d1,
                    log_integrand: Box::new(move |x| l(x, r2) - base),
                },
                Factor {
                    dist: d2,
                    log_integrand: Box::new(move |y| l(r1, y)),
                },
            ])
        }
        _ => None,
    }
}

/// Maps a quadrature failure that signals an infinite integral to `None`.
fn converged<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::QuadratureNotConverged { .. }) | Err(Error::NonFiniteIntegrand(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

struct FactorOutcome<T> {
    full: Option<T>,
    evidence: Option<DivergenceEvidence<T>>,
}

fn evaluate_factor<T: Scalar>(
    factor: &Factor<'_, T>,
    kind: ConditionKind,
    levels: Option<&[T]>,
) -> Result<FactorOutcome<T>> {
    let f = &factor.log_integrand;
    let full = converged(quadrature_log_expectation(&factor.dist, f, None))?.map(|q| q.value);
    let mut family = default_family::<T>(factor.dist.law(), kind);
    if let Some(lv) = levels {
        family.levels = lv.to_vec();
    }
    let evidence = converged(detect_divergence(
        |lvl| {
            quadrature_log_expectation(&factor.dist, f, Some(family.truncation(lvl)))
                .map(|q| q.value)
        },
        &family.levels,
        family.model,
    ))?;
    Ok(FactorOutcome { full, evidence })
}

/// [`evaluate_condition_with`] using the default ladders and stopping grid.
pub fn evaluate_condition<T: Scalar, M: ProcessModel<T>>(
    model: &M,
    spec: &ConditionSpec<T>,
    seeds: SeedSpec,
    n: usize,
) -> Result<ConditionReport> {
    evaluate_condition_with(model, spec, &EvaluationOptions::new(seeds, n))
}

/// Decides whether `E[integrand]` is finite for the model.
///
/// When the log-integrand splits into one function per independent driver,
/// the expectation is a product of one-dimensional quadratures and each
/// factor also gets a truncation ladder. A factor whose ladder diverges makes
/// the product diverge; if every factor converges the verdict is finite and
/// Monte Carlo at the horizon serves as a cross-check. Otherwise only Monte
/// Carlo over the stopping family is run and the verdict is inconclusive.
pub fn evaluate_condition_with<T: Scalar, M: ProcessModel<T>>(
    model: &M,
    spec: &ConditionSpec<T>,
    opts: &EvaluationOptions<T>,
) -> Result<ConditionReport> {
    spec.check_model(model)?;
    let mut report = ConditionReport {
        condition: spec.to_string(),
        verdict: Verdict::Inconclusive,
        estimate: None,
        divergence: None,
        quadrature: None,
        route: Route::MonteCarlo,
        r_squared: None,
        seed: opts.seeds.seed,
    };

    let Some(factors) = separable_factors(model, spec) else {
        if opts.n >= 2 {
            let max_jumps = model
                .build_path(
                    &model
                        .drivers()
                        .iter()
                        .map(|d| d.median())
                        .collect::<Vec<_>>(),
                )?
                .path
                .jumps()
                .len();
            let fam = estimate_stopping_family(
                model,
                spec,
                &opts.grid,
                max_jumps,
                opts.n,
                opts.seeds,
                opts.sampling,
            )?;
            report.estimate = Some(fam.max().1.into());
        }
        return Ok(report);
    };
    report.route = if factors.len() == 1 {
        Route::Quadrature
    } else {
        Route::SeparableQuadrature
    };

    let outcomes = factors
        .iter()
        .map(|f| evaluate_factor(f, spec.kind(), opts.levels.as_deref()))
        .collect::<Result<Vec<_>>>()?;

    // the other factors' contribution: full value, else the deepest truncation
    let others = |skip: usize| -> T {
        outcomes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, o)| {
                o.full
                    .or_else(|| o.evidence.as_ref().and_then(|e| e.values.last().copied()))
                    .unwrap_or(T::one())
            })
            .fold(T::one(), |a, b| a * b)
    };

    if let Some((i, ev)) = outcomes.iter().enumerate().find_map(|(i, o)| {
        o.evidence
            .as_ref()
            .filter(|e| e.is_diverging())
            .map(|e| (i, e))
    }) {
        let ev = ev.scaled(others(i));
        report.verdict = Verdict::Diverging;
        report.r_squared = Some(ev.r_squared.as_f64());
        report.divergence = Some((&ev).into());
        return Ok(report);
    }

    if outcomes.iter().all(|o| o.full.is_some()) {
        let value = outcomes
            .iter()
            .map(|o| o.full.unwrap())
            .fold(T::one(), |a, b| a * b);
        report.verdict = Verdict::Finite;
        report.quadrature = Some(value.as_f64());
        if opts.n >= 2 {
            let est = estimate_log_many(
                model,
                1,
                |p: &JumpPath<T>, out| {
                    out[0] = spec
                        .log_integrand(model, p, p.horizon())
                        .unwrap_or(T::nan())
                },
                opts.n,
                opts.seeds,
                opts.sampling,
            )?;
            report.estimate = Some(est[0].into());
        }
        return Ok(report);
    }

    if let Some((i, ev)) = outcomes.iter().enumerate().find_map(|(i, o)| {
        if o.full.is_none() {
            o.evidence.as_ref().map(|e| (i, e))
        } else {
            None
        }
    }) {
        let ev = ev.scaled(others(i));
        report.r_squared = Some(ev.r_squared.as_f64());
        report.divergence = Some((&ev).into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{example1_model, example2_model, example3_model, PredictableControl};

    fn no_mc() -> EvaluationOptions<f64> {
        EvaluationOptions::new(SeedSpec::default(), 0)
    }

    #[test]
    fn example1_jacod_diverges_with_half_log_slope() {
        let r =
            evaluate_condition_with(&example1_model(), &ConditionSpec::jacod(), &no_mc()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverging);
        let d = r.divergence.unwrap();
        assert!((0.45..=0.55).contains(&d.slope), "{}", d.slope);
        assert!(r.r_squared.unwrap() >= 0.99);
        assert!(r.estimate.is_none());
    }

    #[test]
    fn example1_unit_control_is_finite() {
        let spec = ConditionSpec::theorem1(PredictableControl::one(), None).unwrap();
        let r = evaluate_condition_with(&example1_model(), &spec, &no_mc()).unwrap();
        assert_eq!(r.verdict, Verdict::Finite);
        assert!((r.quadrature.unwrap() - 1.248740710242008).abs() < 1e-9);
    }

    #[test]
    fn example1_unsupported_kinds() {
        let spec = ConditionSpec::simple(ConditionKind::ProtterShimbo).unwrap();
        assert!(matches!(
            evaluate_condition_with(&example1_model(), &spec, &no_mc()),
            Err(Error::UnsupportedModel { .. })
        ));
    }

    #[test]
    fn example2_protter_shimbo_diverges() {
        let spec = ConditionSpec::simple(ConditionKind::ProtterShimbo).unwrap();
        let r = evaluate_condition_with(&example2_model::<f64>(), &spec, &no_mc()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverging);
    }

    #[test]
    fn example3_contrast() {
        let m = example3_model::<f64>();
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let spec =
                ConditionSpec::theorem1(PredictableControl::constant(a).unwrap(), None).unwrap();
            let r = evaluate_condition_with(&m, &spec, &no_mc()).unwrap();
            assert_eq!(r.verdict, Verdict::Diverging, "a = {a}");
        }
        let spec = ConditionSpec::theorem1(PredictableControl::indicator_after(1.0).unwrap(), None)
            .unwrap();
        let r = evaluate_condition_with(&m, &spec, &no_mc()).unwrap();
        assert_eq!(r.verdict, Verdict::Finite);
        assert_eq!(r.route, Route::SeparableQuadrature);
        let v = r.quadrature.unwrap();
        assert!((v / 1.6398388435133682 - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn non_separable_falls_back_to_monte_carlo() {
        let spec = ConditionSpec::simple(ConditionKind::Lemma1).unwrap();
        let opts = EvaluationOptions::new(SeedSpec::default(), 2000);
        let r = evaluate_condition_with(&example3_model::<f64>(), &spec, &opts).unwrap();
        assert_eq!(r.route, Route::MonteCarlo);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.estimate.is_some());
    }

    #[test]
    fn report_json_has_exact_fields() {
        let r =
            evaluate_condition_with(&example1_model(), &ConditionSpec::jacod(), &no_mc()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "condition",
                "divergence",
                "estimate",
                "quadrature",
                "verdict"
            ]
        );
        let mut dk: Vec<_> = v["divergence"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        dk.sort();
        assert_eq!(dk, ["levels", "model", "slope", "values"]);
        assert_eq!(r.to_csv().lines().count(), 5);
        assert!(r
            .to_csv()
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("jacod,0,log,"));
    }
}
