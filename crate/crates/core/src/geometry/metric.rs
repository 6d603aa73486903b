use nalgebra::DMatrix;

use super::fd::{richardson_gradient, DEFAULT_STEP};
use super::Chart;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Hand-coded chart second derivatives.
    Analytic,
    /// Central differences of the metric components with one Richardson step.
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone)]
enum MetricSource {
    Minkowski { dim: usize },
    Pullback(Chart),
}

/// `g_{μν}` as a function of position.
#[derive(Debug, Clone)]
pub struct MetricField {
    source: MetricSource,
    mode: DerivativeMode,
}

fn minkowski(dim: usize) -> DMatrix<f64> {
    let mut eta = DMatrix::identity(dim, dim);
    eta[(0, 0)] = -1.0;
    eta
}

/// Minkowski metric `η` pulled back to the chart: `g' = Jᵀ η J` with `J = ∂x/∂x'`.
///
/// Built-in charts get analytic derivatives; custom charts use finite differences.
pub fn pullback_metric(chart: &Chart) -> MetricField {
    let mode = if chart.has_analytic_derivatives() {
        DerivativeMode::Analytic
    } else {
        DerivativeMode::FiniteDifference { step: DEFAULT_STEP }
    };
    MetricField {
        source: MetricSource::Pullback(chart.clone()),
        mode,
    }
}

impl MetricField {
    pub fn minkowski(dim: usize) -> Self {
        Self {
            source: MetricSource::Minkowski { dim },
            mode: DerivativeMode::Analytic,
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        match &self.source {
            MetricSource::Minkowski { dim } => *dim,
            MetricSource::Pullback(chart) => chart.dim(),
        }
    }

    pub fn chart(&self) -> Option<&Chart> {
        match &self.source {
            MetricSource::Pullback(chart) => Some(chart),
            MetricSource::Minkowski { .. } => None,
        }
    }

    pub fn components(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        match &self.source {
            MetricSource::Minkowski { dim } => Ok(minkowski(*dim)),
            MetricSource::Pullback(chart) => {
                let j = chart.inverse_jacobian(p)?;
                Ok(j.transpose() * minkowski(chart.dim()) * j)
            }
        }
    }

    pub fn inverse(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.components(p)?;
        let det = g.determinant();
        if !det.is_finite() || det.abs() < 1e-14 {
            return Err(Error::SingularMetric { point: p.to_vec() });
        }
        g.try_inverse()
            .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })
    }

    /// `∂_ρ g_{μν}`; entry `[ρ]` is the `(μ, ν)` matrix.
    pub fn derivative(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let n = self.dim();
        match (&self.source, self.mode) {
            (MetricSource::Minkowski { .. }, _) => Ok(vec![DMatrix::zeros(n, n); n]),
            (MetricSource::Pullback(chart), DerivativeMode::Analytic) => {
                let j = chart.inverse_jacobian(p)?;
                let h = chart.inverse_hessian(p)?;
                let eta = minkowski(n);
                Ok((0..n)
                    .map(|rho| {
                        // d_ρ J^α_μ = H^α_{ρμ}
                        let dj = DMatrix::from_fn(n, n, |alpha, mu| h[alpha][(rho, mu)]);
                        let half = dj.transpose() * &eta * &j;
                        &half + half.transpose()
                    })
                    .collect())
            }
            (MetricSource::Pullback(_), DerivativeMode::FiniteDifference { step }) => {
                finite_difference_metric_derivative(self, p, step)
            }
        }
    }
}

fn finite_difference_metric_derivative(
    metric: &MetricField,
    p: &[f64],
    step: f64,
) -> Result<Vec<DMatrix<f64>>> {
    let n = metric.dim();
    let f = |q: &[f64]| -> Result<Vec<f64>> { Ok(metric.components(q)?.iter().copied().collect()) };
    Ok(richardson_gradient(&f, p, step)?
        .into_iter()
        .map(|flat| DMatrix::from_column_slice(n, n, &flat))
        .collect())
}

/// Levi-Civita coefficients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^α_{μν}`
    pub fn get(&self, alpha: usize, mu: usize, nu: usize) -> f64 {
        self.data[(alpha * self.dim + mu) * self.dim + nu]
    }

    fn set(&mut self, alpha: usize, mu: usize, nu: usize, v: f64) {
        self.data[(alpha * self.dim + mu) * self.dim + nu] = v;
    }

    /// `Γ^ρ_{ρμ}`
    pub fn trace(&self, mu: usize) -> f64 {
        (0..self.dim).map(|rho| self.get(rho, rho, mu)).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_difference(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `Γ^α_{μν} = ½ g^{αβ} (∂_μ g_{βν} + ∂_ν g_{βμ} - ∂_β g_{μν})`
pub fn christoffel(metric: &MetricField, p: &[f64]) -> Result<Christoffel> {
    let n = metric.dim();
    let g_inv = metric.inverse(p)?;
    let dg = metric.derivative(p)?;
    let mut gamma = Christoffel::zeros(n);
    for alpha in 0..n {
        for mu in 0..n {
            for nu in mu..n {
                let v: f64 = (0..n)
                    .map(|beta| {
                        0.5 * g_inv[(alpha, beta)]
                            * (dg[mu][(beta, nu)] + dg[nu][(beta, mu)] - dg[beta][(mu, nu)])
                    })
                    .sum();
                gamma.set(alpha, mu, nu, v);
                gamma.set(alpha, nu, mu, v);
            }
        }
    }
    Ok(gamma)
}

/// Christoffel symbols of a metric field, evaluated on demand.
#[derive(Debug, Clone)]
pub struct ChristoffelField {
    metric: MetricField,
}

impl ChristoffelField {
    pub fn new(metric: MetricField) -> Self {
        Self { metric }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn at(&self, p: &[f64]) -> Result<Christoffel> {
        christoffel(&self.metric, p)
    }
}

/// `max |∇_α g_{μν}|` with `∂g` taken by finite differences, independently of the
/// metric's own derivative mode.
pub fn metric_compatibility_deviation(metric: &MetricField, p: &[f64]) -> Result<f64> {
    let n = metric.dim();
    let g = metric.components(p)?;
    let gamma = christoffel(metric, p)?;
    let dg = finite_difference_metric_derivative(metric, p, DEFAULT_STEP)?;
    let mut worst: f64 = 0.0;
    for (alpha, dg_alpha) in dg.iter().enumerate() {
        for mu in 0..n {
            for nu in 0..n {
                let mut v = dg_alpha[(mu, nu)];
                for lambda in 0..n {
                    v -= gamma.get(lambda, alpha, mu) * g[(lambda, nu)];
                    v -= gamma.get(lambda, alpha, nu) * g[(mu, lambda)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// `R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ} Γ^λ_{νσ} - Γ^ρ_{νλ} Γ^λ_{μσ}`,
/// flattened as `((ρ·n + σ)·n + μ)·n + ν`. `∂Γ` is taken by finite differences.
pub fn riemann(gamma: &ChristoffelField, p: &[f64]) -> Result<Vec<f64>> {
    let n = gamma.dim();
    let here = gamma.at(p)?;
    let f = |q: &[f64]| -> Result<Vec<f64>> { Ok(gamma.at(q)?.as_slice().to_vec()) };
    let d = richardson_gradient(&f, p, DEFAULT_STEP)?;
    let dg = |mu: usize, rho: usize, a: usize, b: usize| d[mu][(rho * n + a) * n + b];
    let mut out = vec![0.0; n * n * n * n];
    for rho in 0..n {
        for sigma in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    let mut v = dg(mu, rho, nu, sigma) - dg(nu, rho, mu, sigma);
                    for lambda in 0..n {
                        v += here.get(rho, mu, lambda) * here.get(lambda, nu, sigma)
                            - here.get(rho, nu, lambda) * here.get(lambda, mu, sigma);
                    }
                    out[((rho * n + sigma) * n + mu) * n + nu] = v;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pullback_is_minkowski() {
        let g = pullback_metric(&Chart::identity(2));
        for p in [[0.0, 0.0], [1.3, -4.0]] {
            assert_eq!(g.components(&p).unwrap(), minkowski(2));
            assert!(christoffel(&g, &p)
                .unwrap()
                .as_slice()
                .iter()
                .all(|&v| v == 0.0));
        }
    }

    #[test]
    fn rindler_metric_is_static() {
        let alpha = 0.7;
        let g = pullback_metric(&Chart::rindler(alpha).unwrap());
        for p in [[0.0, 0.3], [0.8, -0.5], [-1.1, 1.7]] {
            let m = g.components(&p).unwrap();
            let lapse = 1.0 + alpha * p[1];
            assert!((m[(0, 0)] + lapse * lapse).abs() < 1e-12);
            assert!((m[(1, 1)] - 1.0).abs() < 1e-12);
            assert!(m[(0, 1)].abs() < 1e-12 && m[(1, 0)].abs() < 1e-12);
        }
    }

    #[test]
    fn rindler_christoffels_at_origin() {
        let g = pullback_metric(&Chart::rindler(1.0).unwrap());
        let gamma = christoffel(&g, &[0.0, 0.0]).unwrap();
        for a in 0..2 {
            for m in 0..2 {
                for n in 0..2 {
                    let want = match (a, m, n) {
                        (0, 0, 1) | (0, 1, 0) | (1, 0, 0) => 1.0,
                        _ => 0.0,
                    };
                    assert!((gamma.get(a, m, n) - want).abs() < 1e-13, "Γ^{a}_{m}{n}");
                }
            }
        }
        // Γ^ρ_{ρμ} = ∂_μ log sqrt|g|, with sqrt|g| = 1 + x
        assert!((gamma.trace(1) - 1.0).abs() < 1e-13);
        assert!(gamma.trace(0).abs() < 1e-13);
    }

    #[test]
    fn dilation_metric_on_initial_surface() {
        let lambda = 0.3;
        let g = pullback_metric(&Chart::dilation(lambda).unwrap());
        let x = 1.7;
        let m = g.components(&[0.0, x]).unwrap();
        assert!((m[(0, 0)] - (-1.0 + lambda * lambda * x * x)).abs() < 1e-14);
        assert!((m[(0, 1)] + lambda * x).abs() < 1e-14);
        assert!((m[(1, 1)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_mode_tracks_analytic_mode() {
        let chart = Chart::rindler(1.0).unwrap();
        let analytic = pullback_metric(&chart);
        let numeric = analytic
            .clone()
            .with_mode(DerivativeMode::FiniteDifference { step: 1e-4 });
        for p in [[0.2, 0.1], [-0.7, 1.5], [0.9, -0.4]] {
            let a = christoffel(&analytic, &p).unwrap();
            let b = christoffel(&numeric, &p).unwrap();
            assert!(a.max_abs_difference(&b) < 1e-6);
        }
    }

    #[test]
    fn singular_metric_is_reported() {
        let chart = Chart::from_maps(
            "null",
            2,
            |p: &[f64]| p.to_vec(),
            |p: &[f64]| vec![p[0] + p[1], p[0] + p[1]],
        );
        let err = pullback_metric(&chart).components(&[0.1, 0.2]).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }));
    }
}
