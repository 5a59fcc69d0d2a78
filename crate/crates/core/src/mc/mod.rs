//! Expectations of path functionals: quadrature over the driving laws,
//! seeded parallel Monte Carlo, divergence detection and verdicts.

mod condition;
mod divergence;
mod engine;
mod expectation;

pub use condition::{
    default_family, evaluate_condition, evaluate_condition_with, ConditionReport,
    DivergenceSummary, EstimateSummary, EvaluationOptions, Route, TruncationFamily, Verdict,
};
pub use divergence::{detect_divergence, fit_growth, DivergenceEvidence, GrowthFit, GrowthModel};
pub use engine::{
    estimate_expectation, estimate_log_many, estimate_many, estimate_stopping_family, Estimate,
    Sampling, SeedSpec, StoppingFamily, StoppingTime, MAX_NONFINITE_FRACTION,
};
pub use expectation::{quadrature_expectation, quadrature_log_expectation, Truncation};
