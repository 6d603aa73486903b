use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ModeBasis, NORM_TOLERANCE};
use crate::{Error, Result};

/// A one-particle state `Σ_n c_n |1_n⟩`.
///
/// A state is either normalized, or "sandwiched": the unnormalized result of
/// applying `H^{-1/2}`, which is what every localization expectation consumes.
#[derive(Debug, Clone)]
pub struct SingleParticleState {
    basis: Arc<ModeBasis>,
    amplitudes: Vec<Complex64>,
    sandwiched: bool,
}

impl SingleParticleState {
    /// Wraps amplitudes that must already be normalized and respect the zero-mode policy.
    pub fn from_amplitudes(basis: Arc<ModeBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_amplitudes_unchecked(basis, amplitudes)?;
        state.check_zero_mode()?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("Σ|c|² = {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Normalizes the given amplitudes. The excluded zero mode must carry no weight.
    pub fn normalized(basis: Arc<ModeBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::from_amplitudes_unchecked(basis, amplitudes)?;
        state.check_zero_mode()?;
        let norm = state.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("amplitudes have zero norm".into()));
        }
        state.amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(state)
    }

    /// Skips the normalization and zero-mode checks; only the length is validated.
    ///
    /// Useful for exercising error paths downstream.
    pub fn from_amplitudes_unchecked(
        basis: Arc<ModeBasis>,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            basis,
            amplitudes,
            sandwiched: false,
        })
    }

    pub fn pure_mode(basis: Arc<ModeBasis>, index: usize) -> Result<Self> {
        if index >= basis.len() {
            return Err(Error::InvalidState(format!(
                "mode index {index} out of range"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.len()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(basis, amplitudes)
    }

    /// Complex Gaussian amplitudes drawn from a ChaCha stream, then normalized.
    pub fn random(basis: Arc<ModeBasis>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitudes = (0..basis.len())
            .map(|i| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                if basis.is_excluded(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(re, im)
                }
            })
            .collect();
        Self::normalized(basis, amplitudes).expect("gaussian amplitudes are almost surely nonzero")
    }

    pub fn basis(&self) -> &Arc<ModeBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_sandwiched(&self) -> bool {
        self.sandwiched
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Spatial reflection `x → -x`: `c_n → c_{-n}`, the Nyquist mode mapping to itself.
    pub fn reflected(&self) -> Self {
        let amplitudes = (0..self.basis.len())
            .map(|i| self.amplitudes[self.basis.reflected_index(i)])
            .collect();
        Self {
            basis: self.basis.clone(),
            amplitudes,
            sandwiched: self.sandwiched,
        }
    }

    fn check_zero_mode(&self) -> Result<()> {
        if let Some(z) = self.basis.excluded_mode() {
            if self.amplitudes[z] != Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidState(
                    "massless field: the zero mode must carry no amplitude".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Gaussian packet `c_n ∝ exp(-(k_n - k̄)² w² / 4 - i k_n x̄)`.
pub fn make_wave_packet(
    basis: Arc<ModeBasis>,
    center: f64,
    width: f64,
    mean_momentum: f64,
) -> Result<SingleParticleState> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidState(format!(
            "packet width {width} must be > 0"
        )));
    }
    if !center.is_finite() || !mean_momentum.is_finite() {
        return Err(Error::InvalidState(
            "packet center and momentum must be finite".into(),
        ));
    }
    let amplitudes: Vec<Complex64> = basis
        .momenta()
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            if basis.is_excluded(i) {
                return Complex64::new(0.0, 0.0);
            }
            let dk = k - mean_momentum;
            Complex64::from_polar((-dk * dk * width * width / 4.0).exp(), -k * center)
        })
        .collect();
    if amplitudes.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::DegeneratePacket);
    }
    SingleParticleState::normalized(basis, amplitudes)
}

/// `c̃_n = ω_n^{-1/2} c_n`; the result is marked sandwiched and is not renormalized.
pub fn apply_inverse_sqrt_hamiltonian(state: &SingleParticleState) -> Result<SingleParticleState> {
    if state.sandwiched {
        return Err(Error::InvalidState("state is already sandwiched".into()));
    }
    let basis = &state.basis;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(basis.frequencies())
        .enumerate()
        .map(|(i, (&c, &w))| {
            if w > 0.0 {
                Ok(c / w.sqrt())
            } else if c == Complex64::new(0.0, 0.0) {
                Ok(c)
            } else {
                Err(Error::SingularOperator {
                    mode: basis.mode_numbers()[i],
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SingleParticleState {
        basis: basis.clone(),
        amplitudes,
        sandwiched: true,
    })
}

/// Free evolution `c_n(t) = c_n e^{-i ω_n t}`.
pub fn evolve(state: &SingleParticleState, t: f64) -> SingleParticleState {
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(state.basis.frequencies())
        .map(|(&c, &w)| c * Complex64::from_polar(1.0, -w * t))
        .collect();
    SingleParticleState {
        basis: state.basis.clone(),
        amplitudes,
        sandwiched: state.sandwiched,
    }
}
