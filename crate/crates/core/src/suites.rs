//! Grid and random property suites for the scalar inequalities.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::girsanov::{lemma2_lhs, lemma3_gap, monotone_reduction_gap};
use crate::paths::stream_rng;

/// Values below this count as violations.
pub const SLACK: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    pub min_value: f64,
    /// Arguments at the minimum.
    pub argmin: [f64; 2],
    /// `[arg0, arg1, value]` of the first violation found.
    pub first_violation: Option<[f64; 3]>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            violations: 0,
            min_value: f64::INFINITY,
            argmin: [f64::NAN; 2],
            first_violation: None,
        }
    }

    fn record(&mut self, p: f64, q: f64, v: f64) {
        self.checked += 1;
        if v < self.min_value || self.min_value.is_nan() {
            self.min_value = v;
            self.argmin = [p, q];
        }
        if !(v >= SLACK) {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some([p, q, v]);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// The quadratic-plus-indicator expression with the indicator condition
/// negated, for exercising the suite.
pub fn lemma2_flipped_indicator(x: f64, eps: f64) -> Result<f64> {
    let v = lemma2_lhs(x, eps)?;
    let boost = 2.0 * eps;
    Ok(if 1.0 - x < eps { v - boost } else { v + boost })
}

/// `f(x, ε)` on a `grid × grid` lattice of `[0, 1] × (0, 1)` plus `random`
/// uniform pairs.
pub fn lemma2_suite<F>(f: F, grid: usize, random: usize, seed: u64) -> Result<SuiteReport>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut r = SuiteReport::new("lemma2");
    for i in 0..grid {
        let x = if grid > 1 {
            i as f64 / (grid - 1) as f64
        } else {
            0.5
        };
        for j in 0..grid {
            let eps = (j as f64 + 0.5) / grid as f64;
            r.record(x, eps, f(x, eps)?);
        }
    }
    let mut rng = stream_rng(seed, 0);
    for _ in 0..random {
        let x: f64 = rng.random();
        let eps: f64 = rng.sample(rand::distr::Open01);
        r.record(x, eps, f(x, eps)?);
    }
    Ok(r)
}

/// `1 + dm` log-uniform on `(lo, hi)`.
fn log_uniform_jump<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp_m1()
}

/// `lemma3_gap(a, dm)` for uniform `a` and `1 + dm` log-uniform on `(1e-9, 1e6 + 1)`.
pub fn lemma3_suite(n: usize, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("lemma3");
    let mut rng = stream_rng(seed, 1);
    for _ in 0..n {
        let a: f64 = rng.random();
        let dm = log_uniform_jump(&mut rng, 1e-9, 1e6 + 1.0);
        r.record(a, dm, lemma3_gap(a, dm)?);
    }
    Ok(r)
}

/// `monotone_reduction_gap(a, Δ)` for uniform `a` and `1 + Δ` log-uniform on `(1e-9, 1001)`.
pub fn monotone_reduction_suite(n: usize, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("monotone_reduction");
    let mut rng = stream_rng(seed, 2);
    for _ in 0..n {
        let a: f64 = rng.random();
        let dm = log_uniform_jump(&mut rng, 1e-9, 1001.0);
        r.record(a, dm, monotone_reduction_gap(a, dm)?);
    }
    Ok(r)
}

/// All three suites at their standard sizes.
pub fn run_all<F>(lemma2: F, seed: u64) -> Result<Vec<SuiteReport>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    Ok(vec![
        lemma2_suite(lemma2, 1000, 100_000, seed)?,
        lemma3_suite(100_000, seed)?,
        monotone_reduction_suite(100_000, seed)?,
    ])
}
