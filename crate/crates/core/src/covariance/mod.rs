//! Localization in non-inertial charts that share the `t = 0` Cartesian surface.
//!
//! Every evaluation happens on that shared surface: the chart normal and its derivatives
//! come from [`crate::geometry`], while field amplitudes are the Cartesian single-particle
//! amplitudes at the coinciding spatial point. Three densities are compared:
//!
//! - the *naive* form `(n⁰)² ⟨H^{-1/2} 𝓗 H^{-1/2}⟩`;
//! - the *linear* form, where the derivatives act on `n⁰ φ` as linear operators, which
//!   differs from the naive form by terms in `n⁰_{,μ}`;
//! - the *modified* density `⟨n^μ T̃_{μν} n^ν⟩`, whose connection couplings replace the
//!   partial derivatives of `n` by covariant ones.

mod experiment;
mod forms;
mod scenario;

pub use experiment::{
    covariance_check, metric_condition_scan, ChartFamily, CovarianceExperiment, CovarianceReport,
    ScanRow, COVARIANCE_TOLERANCE,
};
pub use forms::{
    discrepancy_field, modified_localization_density, naive_contraction_density, pi00_linear,
    transport_deviation, DiscrepancyReport, DECOMPOSITION_TOLERANCE,
};
pub use scenario::{build_scenario, FoliationScenario, NormalSample, NON_INERTIAL_THRESHOLD};
