//! Localization density, interval probabilities and the localization current.
//!
//! Everything here is evaluated in the inertial (Cartesian) frame of the periodic grid.
//! `Π(x) = ⟨Ψ| H^{-1/2} :T00(x): H^{-1/2} |Ψ⟩` and `J^μ(x)` uses `:T^{μ0}:` in its place.

use crate::mode_field::{
    apply_inverse_sqrt_hamiltonian, build_kernel, expectation, Dispersion, KernelKind,
    SingleParticleState,
};
use crate::{Error, Result};

/// Allowed `|a·ΣΠ - 1|`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;
/// Densities in `[-POSITIVITY_TOLERANCE, 0)` are float noise.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;
/// Contracted bound on the continuity residual with continuum dispersion.
pub const CONTINUITY_TOLERANCE: f64 = 1e-9;

const SNAP_SLACK: f64 = 1e-9;

/// A spatial interval `[lo, hi)` on the circle.
///
/// Endpoints snap outward to cell boundaries; cell `j` is `[(j-½)a, (j+½)a)` around grid
/// point `x_j = j·a`. Intervals may extend past either end of `[0, L)` and wrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryInterval {
    lo: f64,
    hi: f64,
}

impl QueryInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidInterval {
                lo,
                hi,
                reason: "need finite lo < hi".into(),
            });
        }
        Ok(Self { lo, hi })
    }

    /// The interval covering `count` whole cells starting at cell `first`.
    pub fn cells(first: i64, count: usize, spacing: f64) -> Result<Self> {
        let lo = (first as f64 - 0.5) * spacing;
        Self::new(lo, lo + count as f64 * spacing)
    }

    /// The whole circle of the given circumference.
    pub fn full_circle(length: f64, spacing: f64) -> Result<Self> {
        Self::new(-0.5 * spacing, length - 0.5 * spacing)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// First cell index and cell count after outward snapping.
    pub fn snap(&self, spacing: f64, num_sites: usize) -> Result<(i64, usize)> {
        let length = spacing * num_sites as f64;
        if self.hi - self.lo > length * (1.0 + SNAP_SLACK) {
            return Err(Error::InvalidInterval {
                lo: self.lo,
                hi: self.hi,
                reason: format!("longer than the circle L = {length}"),
            });
        }
        let first = snap_down(self.lo / spacing + 0.5);
        let end = snap_up(self.hi / spacing + 0.5);
        let count = ((end - first).max(1) as usize).min(num_sites);
        Ok((first, count))
    }
}

fn snap_down(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() < SNAP_SLACK {
        r as i64
    } else {
        v.floor() as i64
    }
}

fn snap_up(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() < SNAP_SLACK {
        r as i64
    } else {
        v.ceil() as i64
    }
}

/// A real density sampled on the grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationField {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
    pub spacing: f64,
}

impl LocalizationField {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, time: f64, spacing: f64) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self {
            grid,
            values,
            time,
            spacing,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a·Σ_j values_j`
    pub fn total(&self) -> f64 {
        self.spacing * self.values.iter().sum::<f64>()
    }

    /// `a·Σ` over the cells of the snapped interval, with periodic wrap.
    pub fn integrate(&self, interval: &QueryInterval) -> Result<f64> {
        let n = self.values.len();
        let (first, count) = interval.snap(self.spacing, n)?;
        let sum: f64 = (0..count as i64)
            .map(|c| self.values[(first + c).rem_euclid(n as i64) as usize])
            .sum();
        Ok(self.spacing * sum)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
            .0
    }

    /// Pointwise `self - other`.
    pub fn minus(&self, other: &LocalizationField) -> LocalizationField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        LocalizationField {
            values,
            ..self.clone()
        }
    }

    pub fn max_abs_difference(&self, other: &LocalizationField) -> f64 {
        self.minus(other).max_abs()
    }
}

fn require_normalized(state: &SingleParticleState) -> Result<()> {
    if state.is_sandwiched() {
        return Err(Error::InvalidState(
            "expected a normalized, unsandwiched state".into(),
        ));
    }
    Ok(())
}

fn sandwiched_field(
    state: &SingleParticleState,
    kind: KernelKind,
    t: f64,
) -> Result<LocalizationField> {
    require_normalized(state)?;
    let basis = state.basis();
    let sandwiched = apply_inverse_sqrt_hamiltonian(state)?;
    let kernel = build_kernel(basis, kind);
    let grid = basis.grid();
    let values = grid
        .iter()
        .map(|&x| expectation(&sandwiched, &kernel, x, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalizationField::new(
        grid,
        values,
        t,
        basis.spec().spacing(),
    ))
}

/// `Π(x_j)` at time `t`.
pub fn localization_density(state: &SingleParticleState, t: f64) -> Result<LocalizationField> {
    let field = sandwiched_field(state, KernelKind::T00, t)?;
    if let Some((j, &v)) = field
        .values
        .iter()
        .enumerate()
        .find(|(_, &v)| v < -POSITIVITY_TOLERANCE)
    {
        return Err(Error::PositivityViolation {
            value: v,
            x: field.grid[j],
        });
    }
    Ok(field)
}

/// `Prob(X ∈ Δ)`, clamped to `[0, 1]` once inside the float-noise band.
pub fn localization_probability(
    state: &SingleParticleState,
    interval: &QueryInterval,
    t: f64,
) -> Result<f64> {
    let field = localization_density(state, t)?;
    probability_from_field(&field, interval)
}

pub(crate) fn probability_from_field(
    field: &LocalizationField,
    interval: &QueryInterval,
) -> Result<f64> {
    let p = field.integrate(interval)?;
    if !(-POSITIVITY_TOLERANCE..=1.0 + POSITIVITY_TOLERANCE).contains(&p) {
        return Err(Error::InvalidState(format!(
            "interval probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `(J⁰, J¹)`. `J⁰` is the localization density; `J¹` sandwiches the symmetrized `:T^{10}:`.
pub fn localization_current(
    state: &SingleParticleState,
    t: f64,
) -> Result<(LocalizationField, LocalizationField)> {
    Ok((
        localization_density(state, t)?,
        sandwiched_field(state, KernelKind::T10, t)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuityContract {
    /// Continuum dispersion: the residual is bounded by [`CONTINUITY_TOLERANCE`].
    Enforced,
    /// Lattice dispersion: the residual is a discretization error and is only reported.
    Waived,
}

#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub residual: LocalizationField,
    pub contract: ContinuityContract,
}

impl ContinuityReport {
    pub fn max_abs(&self) -> f64 {
        self.residual.max_abs()
    }
}

/// `∂_t J⁰ + ∂_x J¹` with both derivatives exact in the mode expansion.
pub fn continuity_residual(state: &SingleParticleState, t: f64) -> Result<ContinuityReport> {
    require_normalized(state)?;
    let basis = state.basis();
    let sandwiched = apply_inverse_sqrt_hamiltonian(state)?;
    let energy = build_kernel(basis, KernelKind::T00);
    let flux = build_kernel(basis, KernelKind::T10);
    let grid = basis.grid();
    let values = grid
        .iter()
        .map(|&x| {
            Ok(energy.time_derivative(&sandwiched, x, t)?
                + flux.space_derivative(&sandwiched, x, t)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = LocalizationField::new(grid, values, t, basis.spec().spacing());
    let contract = match basis.spec().dispersion() {
        Dispersion::Continuum => ContinuityContract::Enforced,
        Dispersion::Lattice => ContinuityContract::Waived,
    };
    if contract == ContinuityContract::Enforced && residual.max_abs() >= CONTINUITY_TOLERANCE {
        return Err(Error::ContinuityViolation {
            residual: residual.max_abs(),
            tolerance: CONTINUITY_TOLERANCE,
        });
    }
    Ok(ContinuityReport { residual, contract })
}
