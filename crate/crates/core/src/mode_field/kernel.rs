use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ModeBasis, SingleParticleState, HERMITICITY_TOLERANCE};
use crate::{Error, Result};

/// Linear field operators at a point, in terms of which every kernel is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOperator {
    Phi,
    Pi,
    Gradient,
}

impl FieldOperator {
    /// Coefficient `u_n` of `a_n f_n(x)` in the operator's mode expansion.
    /// The `a_n†` coefficient is its complex conjugate.
    pub fn mode_coefficient(self, basis: &ModeBasis, index: usize) -> Complex64 {
        if basis.is_excluded(index) {
            return Complex64::new(0.0, 0.0);
        }
        let w = basis.frequencies()[index];
        let length = basis.spec().length();
        let phi = 1.0 / (2.0 * w * length).sqrt();
        match self {
            FieldOperator::Phi => Complex64::new(phi, 0.0),
            FieldOperator::Pi => Complex64::new(0.0, -(w / (2.0 * length)).sqrt()),
            FieldOperator::Gradient => basis.gradient_symbols()[index] * phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `:½π² + ½(∂φ)² + ½m²φ²:`
    T00,
    /// `-:½{π, ∂φ}:`, the energy flux.
    T10,
    /// `:φ²:`
    PhiSq,
    /// `:{π, φ}:`
    PiPhiSym,
    /// `:{∂φ, φ}:`
    DPhiPhiSym,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::T00,
        KernelKind::T10,
        KernelKind::PhiSq,
        KernelKind::PiPhiSym,
        KernelKind::DPhiPhiSym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::T00 => "T00",
            KernelKind::T10 => "T10",
            KernelKind::PhiSq => "phi_sq",
            KernelKind::PiPhiSym => "pi_phi_sym",
            KernelKind::DPhiPhiSym => "dphi_phi_sym",
        }
    }

    /// `(weight, A, B)` terms whose normal-ordered products `w·:AB:` sum to the operator.
    fn terms(self, mass: f64) -> Vec<(f64, FieldOperator, FieldOperator)> {
        use FieldOperator::*;
        match self {
            KernelKind::T00 => {
                vec![
                    (0.5, Pi, Pi),
                    (0.5, Gradient, Gradient),
                    (0.5 * mass * mass, Phi, Phi),
                ]
            }
            KernelKind::T10 => vec![(-1.0, Pi, Gradient)],
            KernelKind::PhiSq => vec![(1.0, Phi, Phi)],
            KernelKind::PiPhiSym => vec![(2.0, Pi, Phi)],
            KernelKind::DPhiPhiSym => vec![(2.0, Gradient, Phi)],
        }
    }
}

/// Single-particle (`a†a`) block of a normal-ordered quadratic operator.
///
/// `K_{nn'}(x, t) = C_{nn'} f_n*(x) f_{n'}(x) e^{i(ω_n - ω_{n'}) t}` with `C` Hermitian.
#[derive(Debug, Clone)]
pub struct QuadraticKernel {
    basis: Arc<ModeBasis>,
    kind: KernelKind,
    coefficients: DMatrix<Complex64>,
}

pub fn build_kernel(basis: &Arc<ModeBasis>, kind: KernelKind) -> QuadraticKernel {
    let n = basis.len();
    let mut coefficients = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (weight, a, b) in kind.terms(basis.spec().mass()) {
        let ua: Vec<Complex64> = (0..n).map(|i| a.mode_coefficient(basis, i)).collect();
        let ub: Vec<Complex64> = (0..n).map(|i| b.mode_coefficient(basis, i)).collect();
        for i in 0..n {
            for j in 0..n {
                // ⟨1_i| :AB: |1_j⟩ = u_A,i* u_B,j + u_B,i* u_A,j
                coefficients[(i, j)] += (ua[i].conj() * ub[j] + ub[i].conj() * ua[j]) * weight;
            }
        }
    }
    QuadraticKernel {
        basis: basis.clone(),
        kind,
        coefficients,
    }
}

impl QuadraticKernel {
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn basis(&self) -> &Arc<ModeBasis> {
        &self.basis
    }

    pub fn entry(&self, x: f64, i: usize, j: usize, t: f64) -> Complex64 {
        let k = self.basis.momenta();
        let w = self.basis.frequencies();
        let phase = (k[j] - k[i]) * x + (w[i] - w[j]) * t;
        self.coefficients[(i, j)] * Complex64::from_polar(1.0, phase)
    }

    pub fn matrix_at(&self, x: f64, t: f64) -> DMatrix<Complex64> {
        let n = self.basis.len();
        DMatrix::from_fn(n, n, |i, j| self.entry(x, i, j, t))
    }
}

/// `Σ c_n* K_{nn'}(x, t) c_{n'}`. The state may be sandwiched.
pub fn expectation(
    state: &SingleParticleState,
    kernel: &QuadraticKernel,
    x: f64,
    t: f64,
) -> Result<f64> {
    weighted_expectation(state, kernel, x, t, |_, _| Complex64::new(1.0, 0.0))
}

impl QuadraticKernel {
    /// `∂_t` of the expectation, exact from `dc_n/dt = -i ω_n c_n`.
    pub fn time_derivative(&self, state: &SingleParticleState, x: f64, t: f64) -> Result<f64> {
        let w = self.basis.frequencies().to_vec();
        weighted_expectation(state, self, x, t, |i, j| Complex64::new(0.0, w[i] - w[j]))
    }

    /// `∂_x` of the expectation, taken spectrally on the plane-wave factors.
    pub fn space_derivative(&self, state: &SingleParticleState, x: f64, t: f64) -> Result<f64> {
        let k = self.basis.momenta().to_vec();
        weighted_expectation(state, self, x, t, |i, j| Complex64::new(0.0, k[j] - k[i]))
    }
}

fn weighted_expectation(
    state: &SingleParticleState,
    kernel: &QuadraticKernel,
    x: f64,
    t: f64,
    weight: impl Fn(usize, usize) -> Complex64,
) -> Result<f64> {
    if !Arc::ptr_eq(state.basis(), &kernel.basis) && state.basis().spec() != kernel.basis.spec() {
        return Err(Error::InvalidState(
            "state and kernel use different mode bases".into(),
        ));
    }
    let basis = &kernel.basis;
    // v_j = c_j e^{i(k_j x - ω_j t)} turns the kernel into the constant matrix C
    let v: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .zip(basis.momenta().iter().zip(basis.frequencies()))
        .map(|(&c, (&k, &w))| c * Complex64::from_polar(1.0, k * x - w * t))
        .collect();
    let n = v.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        if v[i].norm_sqr() == 0.0 {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for (j, vj) in v.iter().enumerate() {
            row += kernel.coefficients[(i, j)] * weight(i, j) * vj;
        }
        total += v[i].conj() * row;
    }
    if total.im.abs() > HERMITICITY_TOLERANCE {
        return Err(Error::HermiticityViolation { residual: total.im });
    }
    Ok(total.re)
}

/// Single-particle wavefunctions `ψ_A(x, t) = Σ_n c_n u_{A,n} f_n(x) e^{-iω_n t}` of the
/// three linear field operators.
///
/// For any real combinations `P = p·(φ, π, ∂φ)` and `Q = q·(φ, π, ∂φ)`,
/// `⟨:PQ:⟩ = 2 Re(ψ_P* ψ_Q)` in the state the amplitudes were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAmplitudes {
    pub phi: Complex64,
    pub pi: Complex64,
    pub gradient: Complex64,
}

pub fn field_amplitudes(state: &SingleParticleState, x: f64, t: f64) -> FieldAmplitudes {
    let basis = state.basis();
    let mut out = FieldAmplitudes {
        phi: Complex64::new(0.0, 0.0),
        pi: Complex64::new(0.0, 0.0),
        gradient: Complex64::new(0.0, 0.0),
    };
    for (i, &c) in state.amplitudes().iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let wave =
            c * Complex64::from_polar(1.0, basis.momenta()[i] * x - basis.frequencies()[i] * t);
        out.phi += wave * FieldOperator::Phi.mode_coefficient(basis, i);
        out.pi += wave * FieldOperator::Pi.mode_coefficient(basis, i);
        out.gradient += wave * FieldOperator::Gradient.mode_coefficient(basis, i);
    }
    out
}

impl FieldAmplitudes {
    /// Amplitude of `p0·φ + p1·π + p2·∂φ`.
    pub fn combine(&self, p: [f64; 3]) -> Complex64 {
        self.phi * p[0] + self.pi * p[1] + self.gradient * p[2]
    }

    /// `⟨:PQ:⟩` for two amplitudes produced by [`combine`](Self::combine).
    pub fn normal_ordered(p: Complex64, q: Complex64) -> f64 {
        2.0 * (p.conj() * q).re
    }
}
