//! Mode-expansion quantization of the free scalar field on a periodic grid.
//!
//! # Conventions
//!
//! The grid has `N` sites `x_j = j·a`, `j = 0..N`, on a circle of length `L = N·a`.
//! Mode numbers run over the symmetric range `n = -(N-1)/2 ..= N/2` (integer
//! division), so for even `N` the Nyquist momentum `k = π/a` is included once and
//! `-π/a` is not. Momenta are `k_n = 2πn/L` and mode functions are plane waves
//! `f_n(x) = e^{i k_n x}`, with `a·Σ_j f_n*(x_j) f_{n'}(x_j) = L·δ_{nn'}`.
//!
//! The field operators are
//!
//! ```text
//! φ(x) = Σ_n (2 ω_n L)^{-1/2}      (a_n f_n(x) + a_n† f_n*(x))
//! π(x) = Σ_n -i (ω_n / 2L)^{1/2}   (a_n f_n(x) - a_n† f_n*(x))
//! ```
//!
//! so that `[φ(x_j), π(x_j')] = i δ_{jj'} / a`. The spatial derivative of a mode
//! function is `D_n f_n`, where the gradient symbol `D_n` is `i k_n` for the
//! continuum dispersion (spectral differentiation) and the forward-difference
//! symbol `(e^{i k_n a} - 1)/a` for the lattice dispersion. In both cases
//! `ω_n² = m² + |D_n|²`, which keeps `∫ :T00: = H` exact on the grid.
//!
//! All quadratic operators are normal ordered and only their `a†a` block is kept,
//! which is exact for expectation values in single-particle states.

mod basis;
mod fock;
mod kernel;
mod state;

pub use basis::{build_mode_basis, Dispersion, LatticeSpec, ModeBasis};
pub use fock::{fock_oracle, FockSpace, LatticeFieldOperators, ORACLE_MAX_SITES};
pub use kernel::{
    build_kernel, expectation, field_amplitudes, FieldAmplitudes, FieldOperator, KernelKind,
    QuadraticKernel,
};
pub use state::{apply_inverse_sqrt_hamiltonian, evolve, make_wave_packet, SingleParticleState};

/// Tolerance on `Σ|c_n|² = 1` for normalized states.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Imaginary residual above which an expectation value is rejected.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
