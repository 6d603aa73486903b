use nalgebra::DMatrix;

use crate::geometry::{
    canonical_normal_field, density_connection, density_covariant_derivative, pullback_metric,
    Chart, ChristoffelField, DensityConnection, DensityVectorField, MetricField,
};
use crate::{Error, Result};

/// A normal whose covariant derivative exceeds this anywhere on the probe set marks the
/// foliation as non-inertial.
pub const NON_INERTIAL_THRESHOLD: f64 = 1e-8;
const SURFACE_TOLERANCE: f64 = 1e-10;

/// Spatial probe points on the shared surface; all lie inside every built-in chart.
fn probe_points() -> impl Iterator<Item = f64> {
    (0..=8).map(|i| 0.25 * i as f64)
}

/// A chart together with the geometry needed to localize on its `t' = 0` slice.
#[derive(Debug, Clone)]
pub struct FoliationScenario {
    pub chart: Chart,
    pub metric: MetricField,
    pub gamma: ChristoffelField,
    pub connection: DensityConnection,
    pub normal: DensityVectorField,
    pub shared_surface_time: f64,
    non_inertial: bool,
}

/// The normal and its derivatives at one point of the shared surface.
#[derive(Debug, Clone)]
pub struct NormalSample {
    /// Chart coordinates of the point.
    pub point: Vec<f64>,
    /// The corresponding Cartesian point.
    pub cartesian: Vec<f64>,
    pub n: Vec<f64>,
    /// `∂_ρ n^μ`, entry `(μ, ρ)`.
    pub partial: DMatrix<f64>,
    /// `n^μ_{;ρ}`, entry `(μ, ρ)`.
    pub covariant: DMatrix<f64>,
    /// `∂x^α/∂x'^ρ`.
    pub inverse_jacobian: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inverse: DMatrix<f64>,
}

pub fn build_scenario(chart: Chart) -> Result<FoliationScenario> {
    let metric = pullback_metric(&chart);
    let gamma = ChristoffelField::new(metric.clone());
    let scenario = FoliationScenario {
        connection: density_connection(gamma.clone(), 0.5),
        normal: canonical_normal_field(&metric),
        chart,
        metric,
        gamma,
        shared_surface_time: 0.0,
        non_inertial: false,
    };
    scenario.check_shared_surface()?;
    let mut worst: f64 = 0.0;
    for x in probe_points() {
        let s = scenario.sample(x)?;
        worst = worst.max(s.covariant.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(FoliationScenario {
        non_inertial: worst > NON_INERTIAL_THRESHOLD,
        ..scenario
    })
}

impl FoliationScenario {
    fn check_shared_surface(&self) -> Result<()> {
        let t = self.shared_surface_time;
        for x in probe_points() {
            let primed = self.chart.forward(&[t, x])?;
            if (primed[0] - t).abs() > SURFACE_TOLERANCE
                || (primed[1] - x).abs() > SURFACE_TOLERANCE
            {
                return Err(Error::Foliation(format!(
                    "chart does not fix the t = {t} surface pointwise: ({t}, {x}) maps to {primed:?}"
                )));
            }
        }
        let origin = [t, 0.0];
        let n = self.normal.at(&origin)?;
        let g = self.metric.components(&origin)?;
        let norm: f64 = (0..n.len())
            .flat_map(|a| (0..n.len()).map(move |b| (a, b)))
            .map(|(a, b)| g[(a, b)] * n[a] * n[b])
            .sum();
        if (norm + 1.0).abs() > SURFACE_TOLERANCE {
            return Err(Error::Foliation(format!(
                "normal at the origin has norm {norm}, not -1"
            )));
        }
        Ok(())
    }

    /// Whether the canonical normal fails to be covariantly constant somewhere on the probes.
    pub fn is_non_inertial(&self) -> bool {
        self.non_inertial
    }

    /// Same scenario with the normal multiplied by `factor`.
    pub fn with_normal_scale(&self, factor: f64) -> Self {
        Self {
            normal: self.normal.scaled(factor),
            ..self.clone()
        }
    }

    /// Geometry at spatial coordinate `x'` of the shared surface.
    pub fn sample(&self, x: f64) -> Result<NormalSample> {
        let point = vec![self.shared_surface_time, x];
        Ok(NormalSample {
            cartesian: self.chart.inverse(&point)?,
            n: self.normal.at(&point)?,
            partial: self.normal.gradient(&point)?,
            covariant: density_covariant_derivative(&self.normal, &self.gamma, &point)?,
            inverse_jacobian: self.chart.inverse_jacobian(&point)?,
            metric: self.metric.components(&point)?,
            metric_inverse: self.metric.inverse(&point)?,
            point,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scenario_is_inertial() {
        let s = build_scenario(Chart::identity(2)).unwrap();
        assert!(!s.is_non_inertial());
        let p = s.sample(1.3).unwrap();
        assert_eq!(p.n, vec![1.0, 0.0]);
        assert_eq!(s.connection.at(&[0.0, 1.3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dilation_normal_moves_but_stays_covariantly_constant() {
        let s = build_scenario(Chart::dilation(0.1).unwrap()).unwrap();
        assert!(!s.is_non_inertial());
        let p = s.sample(1.5).unwrap();
        assert!((p.partial[(0, 0)] + 0.05).abs() < 1e-14);
        assert!(p.partial[(0, 1)].abs() < 1e-14);
        assert!((p.n[1] - 0.15).abs() < 1e-14);
    }

    #[test]
    fn rindler_scenario_is_flagged() {
        let s = build_scenario(Chart::rindler(1.0).unwrap()).unwrap();
        assert!(s.is_non_inertial());
    }

    #[test]
    fn charts_moving_the_surface_are_rejected() {
        let shifted = Chart::from_maps(
            "shift",
            2,
            |p: &[f64]| vec![p[0], p[1] + 0.5],
            |p: &[f64]| vec![p[0], p[1] - 0.5],
        );
        assert!(matches!(build_scenario(shifted), Err(Error::Foliation(_))));
    }
}
