//! Doléans-Dade exponentials of finite-activity jump martingales and the
//! sufficient conditions for their uniform integrability.
//!
//! Paths are stored exactly (jump list plus closed-form drift), every
//! exponential-type functional is evaluated in log-space, and expectations
//! over the example laws are computed by adaptive quadrature with seeded
//! Monte Carlo as a cross-check.
//!
//! ```
//! use doleans::{example1_model, jacod_functional, stoch_exponential, JumpPath, ProcessModel};
//!
//! let path: JumpPath = example1_model().build_path(&[0.25]).unwrap().path;
//! assert!((stoch_exponential(&path, 1.0).unwrap() - 1.25).abs() < 1e-15);
//! assert!(jacod_functional(&path, 1.0).unwrap().finite);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod girsanov;
pub mod mc;
pub mod paths;
pub mod quadrature;
pub mod scalar;
pub mod stochexp;
pub mod suites;

pub use distributions::{
    make_eta_distribution, make_first_jump_time, make_xi_distribution, sample, Law,
};
pub use error::{Error, Result};
pub use girsanov::{
    decompose, lemma2_lhs, lemma3_gap, monotone_reduction_gap, product_identity_residual,
    relative_identity_residual, transformed_jacod_integrand, transformed_jump,
};
pub use mc::{
    detect_divergence, estimate_expectation, evaluate_condition, evaluate_condition_with,
    quadrature_expectation, ConditionReport, EvaluationOptions, GrowthModel, Sampling, SeedSpec,
    Truncation, Verdict,
};
pub use paths::{
    example1_model, example2_model, example3_model, integrate_control, ContQv, Drift, ExampleModel,
    Jump, ModelKind, ProcessModel,
};
pub use scalar::Scalar;
pub use stochexp::{
    jacod_functional, lemma1_functional, lepingle_memin_a, lepingle_memin_functional,
    log_stoch_exponential, protter_shimbo_functional, sde_residual, stoch_exponential,
    theorem1_functional, ConditionKind, FunctionalValue,
};

pub type JumpPath<T = f64> = paths::JumpPath<T>;
pub type PredictableControl<T = f64> = paths::PredictableControl<T>;
pub type ConditionSpec<T = f64> = stochexp::ConditionSpec<T>;
pub type InverseCdfDistribution<T = f64> = distributions::InverseCdfDistribution<T>;
pub type MeasureChangeDecomposition<T = f64> = girsanov::MeasureChangeDecomposition<T>;
pub type Estimate<T = f64> = mc::Estimate<T>;

pub type JumpPathF64 = paths::JumpPath<f64>;
pub type JumpPathF32 = paths::JumpPath<f32>;
pub type PredictableControlF64 = paths::PredictableControl<f64>;
pub type PredictableControlF32 = paths::PredictableControl<f32>;
pub type ConditionSpecF64 = stochexp::ConditionSpec<f64>;
pub type ConditionSpecF32 = stochexp::ConditionSpec<f32>;
pub type InverseCdfDistributionF64 = distributions::InverseCdfDistribution<f64>;
pub type InverseCdfDistributionF32 = distributions::InverseCdfDistribution<f32>;
pub type MeasureChangeDecompositionF64 = girsanov::MeasureChangeDecomposition<f64>;
pub type ExampleModelF64 = paths::ExampleModel<f64>;
pub type ExampleModelF32 = paths::ExampleModel<f32>;
