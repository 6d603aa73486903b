use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    /// `ω = sqrt(m² + k²)` on the discrete momentum grid.
    Continuum,
    /// `ω = sqrt(m² + (2/a)² sin²(k a / 2))`, the nearest-neighbour lattice Hamiltonian.
    Lattice,
}

impl Dispersion {
    pub fn name(self) -> &'static str {
        match self {
            Dispersion::Continuum => "continuum",
            Dispersion::Lattice => "lattice",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    num_sites: usize,
    spacing: f64,
    mass: f64,
    dispersion: Dispersion,
}

impl LatticeSpec {
    pub fn new(num_sites: usize, spacing: f64, mass: f64, dispersion: Dispersion) -> Result<Self> {
        if num_sites < 2 {
            return Err(Error::InvalidLattice(format!(
                "num_sites = {num_sites} < 2"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "spacing = {spacing} must be > 0"
            )));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidLattice(format!("mass = {mass} must be >= 0")));
        }
        Ok(Self {
            num_sites,
            spacing,
            mass,
            dispersion,
        })
    }

    /// Grid of `num_sites` points on a circle of the given circumference.
    pub fn with_length(
        num_sites: usize,
        length: f64,
        mass: f64,
        dispersion: Dispersion,
    ) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidLattice("num_sites = 0".into()));
        }
        Self::new(num_sites, length / num_sites as f64, mass, dispersion)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dispersion(&self) -> Dispersion {
        self.dispersion
    }

    pub fn length(&self) -> f64 {
        self.num_sites as f64 * self.spacing
    }

    /// The massless zero mode is excluded from every state.
    pub fn excludes_zero_mode(&self) -> bool {
        self.mass == 0.0
    }
}

/// Momenta, frequencies and gradient symbols of the plane-wave modes.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    spec: LatticeSpec,
    mode_numbers: Vec<i64>,
    momenta: Vec<f64>,
    frequencies: Vec<f64>,
    gradient_symbols: Vec<Complex64>,
    excluded: Option<usize>,
}

pub fn build_mode_basis(spec: LatticeSpec) -> Arc<ModeBasis> {
    let n = spec.num_sites;
    let a = spec.spacing;
    let m = spec.mass;
    let length = spec.length();
    let n_min = -(((n - 1) / 2) as i64);

    let mode_numbers: Vec<i64> = (0..n as i64).map(|i| n_min + i).collect();
    let momenta: Vec<f64> = mode_numbers
        .iter()
        .map(|&q| 2.0 * PI * q as f64 / length)
        .collect();
    let gradient_symbols: Vec<Complex64> = momenta
        .iter()
        .map(|&k| match spec.dispersion {
            Dispersion::Continuum => Complex64::new(0.0, k),
            Dispersion::Lattice => (Complex64::new(0.0, k * a).exp() - 1.0) / a,
        })
        .collect();
    let frequencies: Vec<f64> = momenta
        .iter()
        .map(|&k| match spec.dispersion {
            Dispersion::Continuum => (m * m + k * k).sqrt(),
            Dispersion::Lattice => {
                let s = (2.0 / a) * (0.5 * k * a).sin();
                (m * m + s * s).sqrt()
            }
        })
        .collect();
    let excluded = spec.excludes_zero_mode().then(|| (-n_min) as usize);

    Arc::new(ModeBasis {
        spec,
        mode_numbers,
        momenta,
        frequencies,
        gradient_symbols,
        excluded,
    })
}

impl ModeBasis {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.mode_numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mode_numbers.is_empty()
    }

    pub fn mode_numbers(&self) -> &[i64] {
        &self.mode_numbers
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `D_n` with `∂_x f_n = D_n f_n`.
    pub fn gradient_symbols(&self) -> &[Complex64] {
        &self.gradient_symbols
    }

    /// Index of the zero-momentum mode when it is excluded (`m = 0`).
    pub fn excluded_mode(&self) -> Option<usize> {
        self.excluded
    }

    pub fn is_excluded(&self, index: usize) -> bool {
        self.excluded == Some(index)
    }

    /// Array index of mode number `n`, if it lies in the symmetric range.
    pub fn index_of(&self, mode_number: i64) -> Option<usize> {
        let first = *self.mode_numbers.first()?;
        let idx = mode_number - first;
        (0..self.len() as i64)
            .contains(&idx)
            .then_some(idx as usize)
    }

    /// Index of the mode with reflected momentum `-k_n`. The Nyquist mode maps to itself.
    pub fn reflected_index(&self, index: usize) -> usize {
        let n = self.mode_numbers[index];
        self.index_of(-n).unwrap_or(index)
    }

    /// Index of the Nyquist mode `k = π/a` (even `N` only).
    pub fn nyquist_index(&self) -> Option<usize> {
        self.spec
            .num_sites
            .is_multiple_of(2)
            .then(|| self.len() - 1)
    }

    pub fn mode_function(&self, index: usize, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.momenta[index] * x)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.spec.num_sites)
            .map(|j| j as f64 * self.spec.spacing)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_site_continuum() {
        let basis = build_mode_basis(LatticeSpec::new(4, 1.0, 1.0, Dispersion::Continuum).unwrap());
        let k = basis.momenta();
        let expected = [-PI / 2.0, 0.0, PI / 2.0, PI];
        for (a, b) in k.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(basis.frequencies()[1], 1.0);
        assert!((basis.frequencies()[3] - (1.0 + PI * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn four_site_lattice_nyquist() {
        let basis = build_mode_basis(LatticeSpec::new(4, 1.0, 1.0, Dispersion::Lattice).unwrap());
        assert!((basis.frequencies()[3] - 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(basis.nyquist_index(), Some(3));
    }

    #[test]
    fn odd_sites_have_symmetric_range() {
        let basis = build_mode_basis(LatticeSpec::new(5, 0.5, 1.0, Dispersion::Continuum).unwrap());
        assert_eq!(basis.mode_numbers(), &[-2, -1, 0, 1, 2]);
        assert_eq!(basis.nyquist_index(), None);
        assert_eq!(basis.reflected_index(0), 4);
    }

    #[test]
    fn gradient_symbol_matches_dispersion() {
        for dispersion in [Dispersion::Continuum, Dispersion::Lattice] {
            let basis = build_mode_basis(LatticeSpec::new(8, 0.3, 0.7, dispersion).unwrap());
            for (w, d) in basis.frequencies().iter().zip(basis.gradient_symbols()) {
                assert!((w * w - 0.49 - d.norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn massless_excludes_zero_mode() {
        let basis = build_mode_basis(LatticeSpec::new(6, 1.0, 0.0, Dispersion::Continuum).unwrap());
        let z = basis.excluded_mode().unwrap();
        assert_eq!(basis.mode_numbers()[z], 0);
        assert_eq!(basis.frequencies()[z], 0.0);
        assert!(basis
            .frequencies()
            .iter()
            .enumerate()
            .all(|(i, &w)| i == z || w > 0.0));
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(LatticeSpec::new(1, 1.0, 1.0, Dispersion::Continuum).is_err());
        assert!(LatticeSpec::new(4, 0.0, 1.0, Dispersion::Continuum).is_err());
        assert!(LatticeSpec::new(4, 1.0, -0.1, Dispersion::Continuum).is_err());
    }
}
