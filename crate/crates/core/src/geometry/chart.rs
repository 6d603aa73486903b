use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::expr::Expr;
use super::fd::{richardson_gradient, DEFAULT_STEP};
use crate::{Error, Result};

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Lower bound on `1 + α x'` inside the Rindler chart.
const RINDLER_FLOOR: f64 = 0.1;
/// Bound on `|λ t|` inside the dilation chart.
const DILATION_CEILING: f64 = 2.0;

#[derive(Clone)]
pub enum ChartKind {
    Identity {
        dim: usize,
    },
    /// `t' = t`, `x' = e^{λt} x`.
    Dilation {
        rate: f64,
    },
    /// `t = (1/α + x') sinh(α t')`, `x = (1/α + x') cosh(α t') - 1/α`.
    Rindler {
        acceleration: f64,
    },
    Custom {
        label: String,
        dim: usize,
        forward: MapFn,
        inverse: MapFn,
    },
}

impl fmt::Debug for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartKind::Identity { dim } => write!(f, "Identity({dim})"),
            ChartKind::Dilation { rate } => write!(f, "Dilation({rate})"),
            ChartKind::Rindler { acceleration } => write!(f, "Rindler({acceleration})"),
            ChartKind::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// An invertible coordinate map from Cartesian coordinates `x` to chart coordinates `x'`.
#[derive(Debug, Clone)]
pub struct Chart {
    kind: ChartKind,
}

impl Chart {
    pub fn identity(dim: usize) -> Self {
        Self {
            kind: ChartKind::Identity { dim },
        }
    }

    pub fn dilation(rate: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidChart(format!(
                "dilation rate {rate} must be finite"
            )));
        }
        Ok(Self {
            kind: ChartKind::Dilation { rate },
        })
    }

    pub fn rindler(acceleration: f64) -> Result<Self> {
        if !(acceleration.is_finite() && acceleration > 0.0) {
            return Err(Error::InvalidChart(format!(
                "rindler acceleration {acceleration} must be > 0"
            )));
        }
        Ok(Self {
            kind: ChartKind::Rindler { acceleration },
        })
    }

    /// A chart from arbitrary closures. Derivatives are taken by finite differences.
    pub fn from_maps<F, G>(label: impl Into<String>, dim: usize, forward: F, inverse: G) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            kind: ChartKind::Custom {
                label: label.into(),
                dim,
                forward: Arc::new(forward),
                inverse: Arc::new(inverse),
            },
        }
    }

    /// A 1+1 chart from expression strings. Forward maps see `t, x` as Cartesian
    /// coordinates; inverse maps see `t, x` as chart coordinates.
    pub fn from_expressions(
        forward: [&str; 2],
        inverse: [&str; 2],
        params: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let vars = ["t", "x"];
        let fw = [
            Expr::parse(forward[0], &vars, params)?,
            Expr::parse(forward[1], &vars, params)?,
        ];
        let inv = [
            Expr::parse(inverse[0], &vars, params)?,
            Expr::parse(inverse[1], &vars, params)?,
        ];
        let label = format!("t'={}, x'={}", forward[0], forward[1]);
        Ok(Self::from_maps(
            label,
            2,
            move |p: &[f64]| vec![fw[0].eval(p), fw[1].eval(p)],
            move |p: &[f64]| vec![inv[0].eval(p), inv[1].eval(p)],
        ))
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ChartKind::Identity { dim } | ChartKind::Custom { dim, .. } => *dim,
            ChartKind::Dilation { .. } | ChartKind::Rindler { .. } => 2,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            ChartKind::Identity { .. } => "identity".into(),
            ChartKind::Dilation { rate } => format!("dilation({rate})"),
            ChartKind::Rindler { acceleration } => format!("rindler({acceleration})"),
            ChartKind::Custom { label, .. } => format!("custom({label})"),
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        !matches!(self.kind, ChartKind::Custom { .. })
    }

    /// Apply `self`, then `then`.
    pub fn compose(&self, then: &Chart) -> Result<Chart> {
        if self.dim() != then.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: then.dim(),
            });
        }
        let (a, b) = (self.clone(), then.clone());
        let (ai, bi) = (self.clone(), then.clone());
        Ok(Self::from_maps(
            format!("{} then {}", self.label(), then.label()),
            self.dim(),
            move |p: &[f64]| match a.forward(p).and_then(|q| b.forward(&q)) {
                Ok(v) => v,
                Err(_) => vec![f64::NAN; p.len()],
            },
            move |p: &[f64]| match bi.inverse(p).and_then(|q| ai.inverse(&q)) {
                Ok(v) => v,
                Err(_) => vec![f64::NAN; p.len()],
            },
        ))
    }

    /// The chart mapping `x'` back to `x`.
    pub fn inverted(&self) -> Chart {
        let (a, b) = (self.clone(), self.clone());
        Self::from_maps(
            format!("inverse of {}", self.label()),
            self.dim(),
            move |p: &[f64]| a.inverse(p).unwrap_or_else(|_| vec![f64::NAN; p.len()]),
            move |p: &[f64]| b.forward(p).unwrap_or_else(|_| vec![f64::NAN; p.len()]),
        )
    }

    /// Whether a chart-coordinate point lies in the chart's working domain.
    pub fn contains_primed(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() || p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            ChartKind::Identity { .. } => true,
            ChartKind::Dilation { rate } => (rate * p[0]).abs() <= DILATION_CEILING,
            ChartKind::Rindler { acceleration } => 1.0 + acceleration * p[1] > RINDLER_FLOOR,
            ChartKind::Custom { inverse, .. } => inverse(p).iter().all(|v| v.is_finite()),
        }
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    fn finite(p: &[f64], v: Vec<f64>) -> Result<Vec<f64>> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(Error::OutOfDomain { point: p.to_vec() })
        }
    }

    /// `x ↦ x'`.
    pub fn forward(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        let out = match &self.kind {
            ChartKind::Identity { .. } => p.to_vec(),
            ChartKind::Dilation { rate } => vec![p[0], (rate * p[0]).exp() * p[1]],
            ChartKind::Rindler { acceleration } => {
                let inv_a = 1.0 / acceleration;
                let big_x = p[1] + inv_a;
                if big_x <= p[0].abs() {
                    return Err(Error::OutOfDomain { point: p.to_vec() });
                }
                let rho = (big_x * big_x - p[0] * p[0]).sqrt();
                vec![(p[0] / big_x).atanh() * inv_a, rho - inv_a]
            }
            ChartKind::Custom { forward, .. } => forward(p),
        };
        let out = Self::finite(p, out)?;
        if !self.contains_primed(&out) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        Ok(out)
    }

    /// `x' ↦ x`.
    pub fn inverse(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        if !self.contains_primed(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        let out = match &self.kind {
            ChartKind::Identity { .. } => p.to_vec(),
            ChartKind::Dilation { rate } => vec![p[0], (-rate * p[0]).exp() * p[1]],
            ChartKind::Rindler { acceleration } => {
                let r = 1.0 / acceleration + p[1];
                let s = acceleration * p[0];
                vec![r * s.sinh(), r * s.cosh() - 1.0 / acceleration]
            }
            ChartKind::Custom { inverse, .. } => inverse(p),
        };
        Self::finite(p, out)
    }

    /// `∂x'^μ/∂x^ν` at a Cartesian point; row `μ`, column `ν`.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(p)?;
        let j = match &self.kind {
            ChartKind::Identity { dim } => DMatrix::identity(*dim, *dim),
            ChartKind::Dilation { rate } => {
                let e = (rate * p[0]).exp();
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, rate * e * p[1], e])
            }
            ChartKind::Rindler { acceleration } => {
                self.forward(p)?;
                let big_x = p[1] + 1.0 / acceleration;
                let q = big_x * big_x - p[0] * p[0];
                let rho = q.sqrt();
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        big_x / (acceleration * q),
                        -p[0] / (acceleration * q),
                        -p[0] / rho,
                        big_x / rho,
                    ],
                )
            }
            ChartKind::Custom { .. } => {
                let f = |q: &[f64]| self.forward(q);
                columns_to_matrix(richardson_gradient(&f, p, DEFAULT_STEP)?)
            }
        };
        nonsingular(j, p)
    }

    /// `∂x^α/∂x'^μ` at a chart point; row `α`, column `μ`.
    pub fn inverse_jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(p)?;
        if !self.contains_primed(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        let j = match &self.kind {
            ChartKind::Identity { dim } => DMatrix::identity(*dim, *dim),
            ChartKind::Dilation { rate } => {
                let e = (-rate * p[0]).exp();
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -rate * e * p[1], e])
            }
            ChartKind::Rindler { acceleration } => {
                let r = 1.0 / acceleration + p[1];
                let s = acceleration * p[0];
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        acceleration * r * s.cosh(),
                        s.sinh(),
                        acceleration * r * s.sinh(),
                        s.cosh(),
                    ],
                )
            }
            ChartKind::Custom { .. } => {
                let f = |q: &[f64]| self.inverse(q);
                columns_to_matrix(richardson_gradient(&f, p, DEFAULT_STEP)?)
            }
        };
        nonsingular(j, p)
    }

    /// `∂²x^α/∂x'^μ∂x'^ν` at a chart point; entry `[α]` is the symmetric `(μ, ν)` matrix.
    pub fn inverse_hessian(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_dim(p)?;
        if !self.contains_primed(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        let n = self.dim();
        Ok(match &self.kind {
            ChartKind::Identity { .. } => vec![DMatrix::zeros(n, n); n],
            ChartKind::Dilation { rate } => {
                let e = (-rate * p[0]).exp();
                vec![
                    DMatrix::zeros(2, 2),
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[rate * rate * e * p[1], -rate * e, -rate * e, 0.0],
                    ),
                ]
            }
            ChartKind::Rindler { acceleration } => {
                let a = *acceleration;
                let r = 1.0 / a + p[1];
                let s = a * p[0];
                vec![
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[a * a * r * s.sinh(), a * s.cosh(), a * s.cosh(), 0.0],
                    ),
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[a * a * r * s.cosh(), a * s.sinh(), a * s.sinh(), 0.0],
                    ),
                ]
            }
            ChartKind::Custom { .. } => {
                let f = |q: &[f64]| -> Result<Vec<f64>> {
                    Ok(self.inverse_jacobian(q)?.iter().copied().collect())
                };
                // partials[μ] is ∂_μ J flattened column-major: index α + n·ν
                let partials = richardson_gradient(&f, p, DEFAULT_STEP)?;
                (0..n)
                    .map(|alpha| {
                        let m = DMatrix::from_fn(n, n, |mu, nu| partials[mu][alpha + n * nu]);
                        (&m + m.transpose()) * 0.5
                    })
                    .collect()
            }
        })
    }

    /// Draws a chart-coordinate point from the test box `t' ∈ [-1, 1]`, `x' ∈ [-2, 2]`,
    /// keeping a margin from the domain edge so finite-difference stencils stay inside.
    pub fn sample_primed<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let mut p: Vec<f64> = (0..self.dim())
                .map(|_| rng.random_range(-2.0..2.0))
                .collect();
            p[0] *= 0.5;
            let inside = match &self.kind {
                ChartKind::Dilation { rate } => (rate * p[0]).abs() <= DILATION_CEILING - 0.1,
                ChartKind::Rindler { acceleration } => {
                    1.0 + acceleration * p[1] > RINDLER_FLOOR + 0.1
                }
                _ => self.contains_primed(&p),
            };
            if inside {
                return p;
            }
        }
    }
}

fn columns_to_matrix(columns: Vec<Vec<f64>>) -> DMatrix<f64> {
    let n = columns.len();
    let rows = columns.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, n, |r, c| columns[c][r])
}

fn nonsingular(j: DMatrix<f64>, p: &[f64]) -> Result<DMatrix<f64>> {
    let det = j.determinant();
    if !det.is_finite() || det.abs() < 1e-14 {
        return Err(Error::SingularJacobian { point: p.to_vec() });
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn builtins() -> Vec<Chart> {
        vec![
            Chart::identity(2),
            Chart::dilation(0.1).unwrap(),
            Chart::dilation(-0.3).unwrap(),
            Chart::rindler(1.0).unwrap(),
            Chart::rindler(0.5).unwrap(),
        ]
    }

    #[test]
    fn forward_inverts_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for chart in builtins() {
            for _ in 0..50 {
                let p = chart.sample_primed(&mut rng);
                let back = chart.forward(&chart.inverse(&p).unwrap()).unwrap();
                for (a, b) in back.iter().zip(&p) {
                    assert!((a - b).abs() < 1e-10, "{}", chart.label());
                }
            }
        }
    }

    #[test]
    fn jacobians_are_mutually_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for chart in builtins() {
            for _ in 0..20 {
                let p = chart.sample_primed(&mut rng);
                let x = chart.inverse(&p).unwrap();
                let prod = chart.jacobian(&x).unwrap() * chart.inverse_jacobian(&p).unwrap();
                assert!((prod - DMatrix::identity(2, 2)).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn analytic_hessian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for chart in builtins() {
            let c = chart.clone();
            let numeric = Chart::from_maps("numeric", 2, move |p: &[f64]| c.forward(p).unwrap(), {
                let c = chart.clone();
                move |p: &[f64]| c.inverse(p).unwrap()
            });
            for _ in 0..10 {
                let p = chart.sample_primed(&mut rng);
                let exact = chart.inverse_hessian(&p).unwrap();
                let approx = numeric.inverse_hessian(&p).unwrap();
                for (e, a) in exact.iter().zip(&approx) {
                    assert!((e - a).amax() < 1e-6, "{}", chart.label());
                }
            }
        }
    }

    #[test]
    fn dilation_shares_the_initial_surface() {
        let chart = Chart::dilation(0.1).unwrap();
        assert_eq!(chart.inverse(&[0.0, 3.7]).unwrap(), vec![0.0, 3.7]);
        let rindler = Chart::rindler(1.0).unwrap();
        let back = rindler.inverse(&[0.0, 2.5]).unwrap();
        assert!((back[0]).abs() < 1e-15 && (back[1] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn rindler_rejects_points_beyond_the_horizon() {
        let chart = Chart::rindler(1.0).unwrap();
        assert!(chart.inverse(&[0.0, -0.95]).is_err());
        assert!(chart.forward(&[2.0, 0.0]).is_err());
    }

    #[test]
    fn expression_chart_matches_builtin() {
        let mut params = BTreeMap::new();
        params.insert("lambda".to_string(), 0.1);
        let custom =
            Chart::from_expressions(["t", "exp(lambda*t)*x"], ["t", "exp(-lambda*t)*x"], &params)
                .unwrap();
        let builtin = Chart::dilation(0.1).unwrap();
        let p = [0.4, -1.3];
        let a = custom.inverse_jacobian(&p).unwrap();
        let b = builtin.inverse_jacobian(&p).unwrap();
        assert!((a - b).amax() < 1e-10);
    }

    #[test]
    fn singular_maps_are_reported() {
        let flat = Chart::from_maps(
            "collapse",
            2,
            |p: &[f64]| vec![p[0], 0.0],
            |p: &[f64]| p.to_vec(),
        );
        assert!(matches!(
            flat.jacobian(&[0.0, 1.0]),
            Err(Error::SingularJacobian { .. })
        ));
    }
}
