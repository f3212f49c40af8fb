//! CAPM and Fama-French three-factor estimation over monthly equity return
//! panels: OLS, Gaussian MLE, conjugate and robust (Cauchy g-prior) Bayes,
//! normality and rank diagnostics, and out-of-sample / leave-one-out model
//! comparison, plus a seeded synthetic panel generator.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, the precision the CLI uses.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod linalg;
pub mod month;
pub mod returns;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use month::Month;
pub use returns::ReturnKind;
pub use scalar::Scalar;

pub type ReturnSeries = returns::ReturnSeries<f64>;
pub type RawRecord = dataset::RawRecord<f64>;
pub type FactorSeries = dataset::FactorSeries<f64>;
pub type AlignedPanel = dataset::AlignedPanel<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type DesignSystem = estimators::DesignSystem<f64>;
pub type FitResult = estimators::FitResult<f64>;
pub type PriorSpec = estimators::PriorSpec<f64>;
pub type GRule = estimators::GRule<f64>;
pub type Estimator = estimators::Estimator<f64>;
pub type PriorMeans = estimators::PriorMeans<f64>;
pub type PanelFit = estimators::PanelFit<f64>;
pub type DescriptiveStats = diagnostics::DescriptiveStats<f64>;
pub type RankVector = diagnostics::RankVector<f64>;
pub type ShapiroWilk = diagnostics::ShapiroWilk<f64>;
pub type StockMse = evaluation::StockMse<f64>;
pub type ComparisonReport = evaluation::ComparisonReport<f64>;
pub type SynthPanel = synth::SynthPanel<f64>;

/// Single-precision variants.
pub type AlignedPanel32 = dataset::AlignedPanel<f32>;
pub type DesignSystem32 = estimators::DesignSystem<f32>;
pub type FitResult32 = estimators::FitResult<f32>;
