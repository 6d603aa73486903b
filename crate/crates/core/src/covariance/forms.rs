use num_complex::Complex64;

use super::scenario::{FoliationScenario, NormalSample};
use crate::localization::LocalizationField;
use crate::mode_field::{
    apply_inverse_sqrt_hamiltonian, build_kernel, expectation, field_amplitudes, FieldAmplitudes,
    KernelKind, SingleParticleState,
};
use crate::{Error, Result};

/// Pointwise bound for `linear = naive + Σ terms`.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-12;

/// The naive and linear forms on the shared surface and the terms separating them.
#[derive(Debug, Clone)]
pub struct DiscrepancyReport {
    pub linear_form: LocalizationField,
    pub naive_form: LocalizationField,
    /// `linear_form - naive_form`.
    pub discrepancy: LocalizationField,
    /// `½ Σ_μ (n⁰_{,μ})² ⟨:φ²:⟩`
    pub term_phi2: LocalizationField,
    /// `½ n⁰ n⁰_{,0} ⟨:{π, φ}:⟩`
    pub term_piphi: LocalizationField,
    /// `½ n⁰ n⁰_{,1} ⟨:{∂φ, φ}:⟩`
    pub term_dphiphi: LocalizationField,
}

impl DiscrepancyReport {
    pub fn term_sum(&self, j: usize) -> f64 {
        self.term_phi2.values[j] + self.term_piphi.values[j] + self.term_dphiphi.values[j]
    }

    /// `max_j |discrepancy - Σ terms|`.
    pub fn decomposition_residual(&self) -> f64 {
        (0..self.discrepancy.len())
            .map(|j| (self.discrepancy.values[j] - self.term_sum(j)).abs())
            .fold(0.0, f64::max)
    }
}

struct SurfaceData {
    samples: Vec<NormalSample>,
    sandwiched: SingleParticleState,
    grid: Vec<f64>,
    spacing: f64,
    time: f64,
}

fn surface(state: &SingleParticleState, scenario: &FoliationScenario) -> Result<SurfaceData> {
    if state.is_sandwiched() {
        return Err(Error::InvalidState("expected an unsandwiched state".into()));
    }
    let basis = state.basis();
    let grid = basis.grid();
    let samples = grid
        .iter()
        .map(|&x| scenario.sample(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceData {
        samples,
        sandwiched: apply_inverse_sqrt_hamiltonian(state)?,
        grid,
        spacing: basis.spec().spacing(),
        time: scenario.shared_surface_time,
    })
}

impl SurfaceData {
    fn field(&self, values: Vec<f64>) -> LocalizationField {
        LocalizationField::new(self.grid.clone(), values, self.time, self.spacing)
    }

    fn amplitudes(&self, s: &NormalSample) -> FieldAmplitudes {
        field_amplitudes(&self.sandwiched, s.cartesian[1], s.cartesian[0])
    }

    fn kernel_values(&self, kind: KernelKind) -> Result<Vec<f64>> {
        let kernel = build_kernel(self.sandwiched.basis(), kind);
        self.samples
            .iter()
            .map(|s| expectation(&self.sandwiched, &kernel, s.cartesian[1], s.cartesian[0]))
            .collect()
    }
}

fn mass_sq(state: &SingleParticleState) -> f64 {
    let m = state.basis().spec().mass();
    m * m
}

/// `½ Σ_μ ⟨(∂_μ(n⁰ φ))²⟩ + ½ m² (n⁰)² ⟨φ²⟩` with the derivatives distributed over `n⁰ φ`
/// before `φ_{,0}` is replaced by `π`.
pub fn pi00_linear(
    state: &SingleParticleState,
    scenario: &FoliationScenario,
) -> Result<LocalizationField> {
    let data = surface(state, scenario)?;
    let m2 = mass_sq(state);
    let values = data
        .samples
        .iter()
        .map(|s| {
            let psi = data.amplitudes(s);
            let (n0, d0, d1) = (s.n[0], s.partial[(0, 0)], s.partial[(0, 1)]);
            (psi.phi * d0 + psi.pi * n0).norm_sqr()
                + (psi.phi * d1 + psi.gradient * n0).norm_sqr()
                + m2 * n0 * n0 * psi.phi.norm_sqr()
        })
        .collect();
    Ok(data.field(values))
}

/// Evaluates the naive form and the three correction terms from the quadratic kernels, and
/// the linear form independently from field amplitudes.
pub fn discrepancy_field(
    state: &SingleParticleState,
    scenario: &FoliationScenario,
) -> Result<DiscrepancyReport> {
    let data = surface(state, scenario)?;
    let linear_form = pi00_linear(state, scenario)?;
    let energy = data.kernel_values(KernelKind::T00)?;
    let phi_sq = data.kernel_values(KernelKind::PhiSq)?;
    let pi_phi = data.kernel_values(KernelKind::PiPhiSym)?;
    let dphi_phi = data.kernel_values(KernelKind::DPhiPhiSym)?;
    let mut naive = Vec::with_capacity(energy.len());
    let (mut phi2, mut piphi, mut dphiphi) = (Vec::new(), Vec::new(), Vec::new());
    for (j, s) in data.samples.iter().enumerate() {
        let (n0, d0, d1) = (s.n[0], s.partial[(0, 0)], s.partial[(0, 1)]);
        naive.push(n0 * n0 * energy[j]);
        phi2.push(0.5 * (d0 * d0 + d1 * d1) * phi_sq[j]);
        piphi.push(0.5 * n0 * d0 * pi_phi[j]);
        dphiphi.push(0.5 * n0 * d1 * dphi_phi[j]);
    }
    let naive_form = data.field(naive);
    Ok(DiscrepancyReport {
        discrepancy: linear_form.minus(&naive_form),
        linear_form,
        naive_form,
        term_phi2: data.field(phi2),
        term_piphi: data.field(piphi),
        term_dphiphi: data.field(dphiphi),
    })
}

/// `⟨n^μ T_{μν} n^ν⟩` with every derivative acting on the product `n φ`, in chart
/// coordinates. `derivative` supplies the `(μ, ρ)` matrix replacing `∂_ρ n^μ`.
fn contraction(
    data: &SurfaceData,
    m2: f64,
    derivative: impl Fn(&NormalSample) -> &nalgebra::DMatrix<f64>,
) -> Vec<f64> {
    data.samples
        .iter()
        .map(|s| {
            let dim = s.n.len();
            let psi = data.amplitudes(s);
            let cartesian = [psi.pi, psi.gradient];
            let a = derivative(s);
            // Y[ρ][μ]: amplitude of D_ρ(n^μ φ)
            let y: Vec<Vec<Complex64>> = (0..dim)
                .map(|rho| {
                    let d_rho: Complex64 = (0..dim)
                        .map(|alpha| cartesian[alpha] * s.inverse_jacobian[(alpha, rho)])
                        .sum();
                    (0..dim)
                        .map(|mu| psi.phi * a[(mu, rho)] + d_rho * s.n[mu])
                        .collect()
                })
                .collect();
            let div: Complex64 = (0..dim).map(|mu| y[mu][mu]).sum();
            let mut value = 2.0 * div.norm_sqr();
            for mu in 0..dim {
                for nu in 0..dim {
                    for rho in 0..dim {
                        for sigma in 0..dim {
                            value -= s.metric[(mu, nu)]
                                * s.metric_inverse[(rho, sigma)]
                                * (y[rho][mu].conj() * y[sigma][nu]).re;
                        }
                    }
                }
            }
            let nn: f64 = (0..dim)
                .flat_map(|mu| (0..dim).map(move |nu| (mu, nu)))
                .map(|(mu, nu)| s.metric[(mu, nu)] * s.n[mu] * s.n[nu])
                .sum();
            value - m2 * nn * psi.phi.norm_sqr()
        })
        .collect()
}

/// `⟨n^μ T̃_{μν} n^ν⟩`: the contraction with `∂_ρ n^μ` replaced by `n^μ_{;ρ}`, which the
/// connection couplings of `T̃` produce.
pub fn modified_localization_density(
    state: &SingleParticleState,
    scenario: &FoliationScenario,
) -> Result<LocalizationField> {
    let data = surface(state, scenario)?;
    let values = contraction(&data, mass_sq(state), |s| &s.covariant);
    Ok(data.field(values))
}

/// The same contraction with plain partial derivatives of `n`: the linear form completed
/// with its spatial components.
pub fn naive_contraction_density(
    state: &SingleParticleState,
    scenario: &FoliationScenario,
) -> Result<LocalizationField> {
    let data = surface(state, scenario)?;
    let values = contraction(&data, mass_sq(state), |s| &s.partial);
    Ok(data.field(values))
}

/// `max_j |Π̃'(x'_j) |det ∂x'/∂x| - Π(x_j)|`: how far the modified density is from being the
/// Cartesian density transported as a weight-1 scalar density.
pub fn transport_deviation(
    state: &SingleParticleState,
    scenario: &FoliationScenario,
) -> Result<f64> {
    let data = surface(state, scenario)?;
    let modified = contraction(&data, mass_sq(state), |s| &s.covariant);
    let cartesian = data.kernel_values(KernelKind::T00)?;
    let mut worst: f64 = 0.0;
    for (j, s) in data.samples.iter().enumerate() {
        let det = scenario.chart.jacobian(&s.cartesian)?.determinant().abs();
        worst = worst.max((modified[j] * det - cartesian[j]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::covariance::build_scenario;
    use crate::geometry::Chart;
    use crate::localization::localization_density;
    use crate::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

    fn packet(dispersion: Dispersion) -> SingleParticleState {
        let basis =
            build_mode_basis(LatticeSpec::with_length(64, 2.0 * PI, 1.0, dispersion).unwrap());
        make_wave_packet(basis, PI, 0.5, 1.5).unwrap()
    }

    #[test]
    fn identity_forms_collapse_to_the_localization_density() {
        let state = packet(Dispersion::Continuum);
        let s = build_scenario(Chart::identity(2)).unwrap();
        let pi = localization_density(&state, 0.0).unwrap();
        assert!(pi00_linear(&state, &s).unwrap().max_abs_difference(&pi) < 1e-13);
        assert!(
            modified_localization_density(&state, &s)
                .unwrap()
                .max_abs_difference(&pi)
                < 1e-13
        );
        let report = discrepancy_field(&state, &s).unwrap();
        assert!(report.discrepancy.max_abs() < 1e-12);
    }

    #[test]
    fn dilation_decomposes() {
        for dispersion in [Dispersion::Continuum, Dispersion::Lattice] {
            let state = packet(dispersion);
            let s = build_scenario(Chart::dilation(0.1).unwrap()).unwrap();
            let report = discrepancy_field(&state, &s).unwrap();
            assert!(report.decomposition_residual() < DECOMPOSITION_TOLERANCE);
            assert!(report.discrepancy.max_abs() > 1e-4);
        }
    }

    #[test]
    fn dilation_modified_density_is_transported() {
        let state = packet(Dispersion::Continuum);
        let s = build_scenario(Chart::dilation(0.1).unwrap()).unwrap();
        assert!(transport_deviation(&state, &s).unwrap() < 1e-12);
        let naive = naive_contraction_density(&state, &s).unwrap();
        let pi = localization_density(&state, 0.0).unwrap();
        assert!(naive.max_abs_difference(&pi) > 1e-4);
    }

    #[test]
    fn modified_density_is_quadratic_in_the_normal() {
        let state = packet(Dispersion::Continuum);
        let s = build_scenario(Chart::rindler(1.0).unwrap()).unwrap();
        let base = modified_localization_density(&state, &s).unwrap();
        let doubled = modified_localization_density(&state, &s.with_normal_scale(2.0)).unwrap();
        for (b, d) in base.values.iter().zip(&doubled.values) {
            assert_eq!(4.0 * b, *d);
        }
    }

    #[test]
    fn sandwiched_inputs_are_rejected() {
        let state = apply_inverse_sqrt_hamiltonian(&packet(Dispersion::Continuum)).unwrap();
        let s = build_scenario(Chart::identity(2)).unwrap();
        assert!(pi00_linear(&state, &s).is_err());
    }
}
