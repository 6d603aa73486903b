use rayon::prelude::*;

use super::forms::{
    discrepancy_field, modified_localization_density, naive_contraction_density,
    transport_deviation,
};
use super::scenario::{build_scenario, FoliationScenario};
use crate::geometry::Chart;
use crate::localization::{localization_density, LocalizationField, QueryInterval};
use crate::mode_field::SingleParticleState;
use crate::{Error, Result};

/// Agreement demanded between chart and Cartesian probabilities.
pub const COVARIANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceReport {
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub prob_cartesian: f64,
    pub prob_chart_naive: f64,
    pub prob_chart_modified: f64,
    pub dev_naive: f64,
    pub dev_modified: f64,
}

/// The three densities on the shared surface, computed once and integrated per interval.
#[derive(Debug, Clone)]
pub struct CovarianceExperiment {
    pub cartesian: LocalizationField,
    pub naive: LocalizationField,
    pub modified: LocalizationField,
}

impl CovarianceExperiment {
    pub fn new(state: &SingleParticleState, scenario: &FoliationScenario) -> Result<Self> {
        Ok(Self {
            cartesian: localization_density(state, scenario.shared_surface_time)?,
            naive: naive_contraction_density(state, scenario)?,
            modified: modified_localization_density(state, scenario)?,
        })
    }

    /// Chart-coordinate intervals coincide with Cartesian ones on the shared surface, so the
    /// same cells are summed for all three densities.
    pub fn check(&self, interval: &QueryInterval) -> Result<CovarianceReport> {
        let prob_cartesian = self.cartesian.integrate(interval)?;
        let prob_chart_naive = self.naive.integrate(interval)?;
        let prob_chart_modified = self.modified.integrate(interval)?;
        Ok(CovarianceReport {
            interval_lo: interval.lo(),
            interval_hi: interval.hi(),
            prob_cartesian,
            prob_chart_naive,
            prob_chart_modified,
            dev_naive: (prob_chart_naive - prob_cartesian).abs(),
            dev_modified: (prob_chart_modified - prob_cartesian).abs(),
        })
    }
}

pub fn covariance_check(
    state: &SingleParticleState,
    chart: Chart,
    interval: &QueryInterval,
) -> Result<CovarianceReport> {
    let scenario = build_scenario(chart)?;
    CovarianceExperiment::new(state, &scenario)?.check(interval)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartFamily {
    Dilation,
    Rindler,
}

impl ChartFamily {
    pub fn name(self) -> &'static str {
        match self {
            ChartFamily::Dilation => "dilation",
            ChartFamily::Rindler => "rindler",
        }
    }

    pub fn chart(self, parameter: f64) -> Result<Chart> {
        match self {
            ChartFamily::Dilation => Chart::dilation(parameter),
            ChartFamily::Rindler => Chart::rindler(parameter),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub parameter: f64,
    pub max_abs_discrepancy: f64,
    /// Largest pointwise departure of the modified density from the transported Cartesian one.
    pub max_dev_modified: f64,
    pub non_inertial: bool,
}

/// Rows come back sorted by parameter, whatever the input order.
pub fn metric_condition_scan(
    family: ChartFamily,
    parameters: &[f64],
    state: &SingleParticleState,
) -> Result<Vec<ScanRow>> {
    if let Some(p) = parameters.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidChart(format!(
            "scan parameter {p} is not finite"
        )));
    }
    let mut sorted = parameters.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted
        .par_iter()
        .map(|&parameter| {
            let scenario = build_scenario(family.chart(parameter)?)?;
            Ok(ScanRow {
                parameter,
                max_abs_discrepancy: discrepancy_field(state, &scenario)?.discrepancy.max_abs(),
                max_dev_modified: transport_deviation(state, &scenario)?,
                non_inertial: scenario.is_non_inertial(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

    fn packet() -> SingleParticleState {
        let basis = build_mode_basis(
            LatticeSpec::with_length(64, 2.0 * PI, 1.0, Dispersion::Continuum).unwrap(),
        );
        make_wave_packet(basis, PI, 0.5, 1.0).unwrap()
    }

    #[test]
    fn identity_probabilities_agree() {
        let r = covariance_check(
            &packet(),
            Chart::identity(2),
            &QueryInterval::new(1.0, 3.0).unwrap(),
        )
        .unwrap();
        assert!(r.dev_naive < 1e-12 && r.dev_modified < 1e-12);
    }

    #[test]
    fn dilation_separates_naive_from_modified() {
        let state = packet();
        let scenario = build_scenario(Chart::dilation(0.1).unwrap()).unwrap();
        let exp = CovarianceExperiment::new(&state, &scenario).unwrap();
        let half = exp.check(&QueryInterval::new(0.0, PI).unwrap()).unwrap();
        assert!(half.dev_modified < COVARIANCE_TOLERANCE);
        assert!(half.dev_naive > 10.0 * COVARIANCE_TOLERANCE);
        let full = exp
            .check(&QueryInterval::full_circle(2.0 * PI, 2.0 * PI / 64.0).unwrap())
            .unwrap();
        assert!((full.prob_chart_modified - 1.0).abs() < COVARIANCE_TOLERANCE);
    }

    #[test]
    fn scan_rows_are_sorted_and_start_at_zero() {
        let rows =
            metric_condition_scan(ChartFamily::Dilation, &[0.1, 0.0, 0.05], &packet()).unwrap();
        let params: Vec<f64> = rows.iter().map(|r| r.parameter).collect();
        assert_eq!(params, vec![0.0, 0.05, 0.1]);
        assert!(rows[0].max_abs_discrepancy < 1e-12 && rows[0].max_dev_modified < 1e-12);
        assert!(rows[1].max_abs_discrepancy <= rows[2].max_abs_discrepancy);
    }

    #[test]
    fn rindler_scan_is_flagged() {
        let rows = metric_condition_scan(ChartFamily::Rindler, &[0.5, 1.0], &packet()).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.non_inertial && r.max_abs_discrepancy > 0.0));
    }
}
