//! Brute-force oracle: lattice field operators as dense matrices on a truncated Fock space.
//!
//! Nothing here reuses the analytic kernels. Normal-mode frequencies are read off the
//! positional lattice coupling matrix, `φ_j` and `π_j` are assembled from explicit
//! ladder-operator matrices, local operators are formed site by site with forward
//! differences, and normal ordering is vacuum subtraction.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Dispersion, KernelKind, LatticeSpec};
use crate::{Error, Result};

pub const ORACLE_MAX_SITES: usize = 6;

type CMatrix = DMatrix<Complex64>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Occupation-number basis of `num_modes` bosonic modes with at most `max_particles` quanta.
#[derive(Debug, Clone)]
pub struct FockSpace {
    num_modes: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl FockSpace {
    pub fn new(num_modes: usize, max_particles: u8) -> Self {
        let mut states = Vec::new();
        let mut current = vec![0u8; num_modes];
        enumerate(&mut current, 0, max_particles, &mut states);
        states.sort_by_key(|s| {
            (
                s.iter().map(|&n| n as u32).sum::<u32>(),
                std::cmp::Reverse(s.clone()),
            )
        });
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            num_modes,
            states,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn total_number(&self, state: usize) -> u32 {
        self.states[state].iter().map(|&n| n as u32).sum()
    }

    pub fn vacuum(&self) -> usize {
        self.index[&vec![0u8; self.num_modes]]
    }

    pub fn one_particle(&self, mode: usize) -> usize {
        let mut occ = vec![0u8; self.num_modes];
        occ[mode] = 1;
        self.index[&occ]
    }

    /// `a_mode` with `a|n⟩ = sqrt(n)|n-1⟩`.
    pub fn annihilation(&self, mode: usize) -> CMatrix {
        let mut m = CMatrix::from_element(self.dim(), self.dim(), czero());
        for (col, occ) in self.states.iter().enumerate() {
            if occ[mode] == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered[mode] -= 1;
            let row = self.index[&lowered];
            m[(row, col)] = Complex64::new((occ[mode] as f64).sqrt(), 0.0);
        }
        m
    }
}

fn enumerate(current: &mut Vec<u8>, pos: usize, remaining: u8, out: &mut Vec<Vec<u8>>) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for n in 0..=remaining {
        current[pos] = n;
        enumerate(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}

/// `φ_j`, `π_j` on every site of a small lattice, as dense Fock-space matrices.
#[derive(Debug, Clone)]
pub struct LatticeFieldOperators {
    spec: LatticeSpec,
    space: FockSpace,
    /// Fock mode slot for each mode number index; `None` for an excluded zero mode.
    slots: Vec<Option<usize>>,
    frequencies: Vec<f64>,
    phi: Vec<CMatrix>,
    pi: Vec<CMatrix>,
}

impl LatticeFieldOperators {
    pub fn build(spec: LatticeSpec) -> Result<Self> {
        let n = spec.num_sites();
        if n > ORACLE_MAX_SITES {
            return Err(Error::OracleRefused(format!(
                "{n} sites exceeds the dense-matrix limit of {ORACLE_MAX_SITES}"
            )));
        }
        if spec.dispersion() != Dispersion::Lattice {
            return Err(Error::OracleRefused(
                "the oracle realizes the lattice Hamiltonian; select lattice dispersion".into(),
            ));
        }
        let a = spec.spacing();
        let m = spec.mass();
        let length = spec.length();

        // m² - (discrete Laplacian), periodic
        let coupling = DMatrix::<f64>::from_fn(n, n, |i, j| {
            let mut v = 0.0;
            if i == j {
                v += m * m + 2.0 / (a * a);
            }
            if (i + 1) % n == j {
                v -= 1.0 / (a * a);
            }
            if (j + 1) % n == i {
                v -= 1.0 / (a * a);
            }
            v
        });

        let first = -(((n - 1) / 2) as i64);
        let mut slots = Vec::with_capacity(n);
        let mut frequencies = Vec::with_capacity(n);
        let mut waves = Vec::with_capacity(n);
        let mut next_slot = 0;
        for q in 0..n as i64 {
            let k = 2.0 * PI * (first + q) as f64 / length;
            let wave: Vec<Complex64> = (0..n)
                .map(|j| Complex64::from_polar(1.0, k * a * j as f64))
                .collect();
            let applied: Vec<Complex64> = (0..n)
                .map(|i| (0..n).map(|j| wave[j] * coupling[(i, j)]).sum())
                .collect();
            let rayleigh: Complex64 = wave
                .iter()
                .zip(&applied)
                .map(|(f, g)| f.conj() * g)
                .sum::<Complex64>()
                / n as f64;
            let omega_sq = rayleigh.re;
            let residual = wave
                .iter()
                .zip(&applied)
                .map(|(f, g)| (g - f * omega_sq).norm())
                .fold(0.0, f64::max);
            if residual > 1e-9 * (1.0 + omega_sq.abs()) {
                return Err(Error::OracleRefused(format!(
                    "plane wave {q} is not a lattice normal mode (residual {residual:e})"
                )));
            }
            let omega = omega_sq.max(0.0).sqrt();
            if omega > 1e-12 {
                slots.push(Some(next_slot));
                next_slot += 1;
            } else {
                slots.push(None);
            }
            frequencies.push(omega);
            waves.push(wave);
        }

        let space = FockSpace::new(next_slot, 2);
        let dim = space.dim();
        let mut phi = vec![CMatrix::from_element(dim, dim, czero()); n];
        let mut pi = vec![CMatrix::from_element(dim, dim, czero()); n];
        for (q, slot) in slots.iter().enumerate() {
            let Some(slot) = *slot else { continue };
            let lower = space.annihilation(slot);
            let raise = lower.adjoint();
            let w = frequencies[q];
            let phi_norm = 1.0 / (2.0 * w * length).sqrt();
            let pi_norm = (w / (2.0 * length)).sqrt();
            for j in 0..n {
                let f = waves[q][j];
                phi[j] += (&lower * f + &raise * f.conj()) * Complex64::new(phi_norm, 0.0);
                pi[j] += (&lower * f - &raise * f.conj()) * Complex64::new(0.0, -pi_norm);
            }
        }
        Ok(Self {
            spec,
            space,
            slots,
            frequencies,
            phi,
            pi,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn phi(&self, site: usize) -> &CMatrix {
        &self.phi[site]
    }

    pub fn pi(&self, site: usize) -> &CMatrix {
        &self.pi[site]
    }

    /// `(φ_{j+1} - φ_j)/a` with periodic wrap.
    pub fn forward_difference(&self, site: usize) -> CMatrix {
        let next = (site + 1) % self.spec.num_sites();
        (&self.phi[next] - &self.phi[site]) / Complex64::new(self.spec.spacing(), 0.0)
    }

    /// `[φ_j, p_j']` with the site momentum `p_j = a π_j`.
    pub fn canonical_commutator(&self, site: usize, other: usize) -> CMatrix {
        let p = &self.pi[other] * Complex64::new(self.spec.spacing(), 0.0);
        &self.phi[site] * &p - &p * &self.phi[site]
    }

    /// Normal-ordered local operator at a site.
    pub fn local_operator(&self, kind: KernelKind, site: usize) -> CMatrix {
        let phi = &self.phi[site];
        let pi = &self.pi[site];
        let dphi = self.forward_difference(site);
        let half = Complex64::new(0.5, 0.0);
        let raw = match kind {
            KernelKind::T00 => {
                let m2 = self.spec.mass() * self.spec.mass();
                (pi * pi) * half
                    + (&dphi * &dphi) * half
                    + (phi * phi) * Complex64::new(0.5 * m2, 0.0)
            }
            KernelKind::T10 => (pi * &dphi + &dphi * pi) * Complex64::new(-0.5, 0.0),
            KernelKind::PhiSq => phi * phi,
            KernelKind::PiPhiSym => pi * phi + phi * pi,
            KernelKind::DPhiPhiSym => &dphi * phi + phi * &dphi,
        };
        let vac = self.space.vacuum();
        let shift = raw[(vac, vac)];
        raw - CMatrix::identity(self.space.dim(), self.space.dim()) * shift
    }

    /// `H = a Σ_j :T00_j:`.
    pub fn hamiltonian(&self) -> CMatrix {
        let a = Complex64::new(self.spec.spacing(), 0.0);
        (0..self.spec.num_sites())
            .map(|j| self.local_operator(KernelKind::T00, j))
            .fold(
                CMatrix::zeros(self.space.dim(), self.space.dim()),
                |acc, t| acc + t * a,
            )
    }

    /// `⟨1_n| op |1_n'⟩` indexed by mode-number position; excluded modes give zero rows.
    pub fn single_particle_block(&self, op: &CMatrix) -> CMatrix {
        let n = self.slots.len();
        CMatrix::from_fn(n, n, |i, j| match (self.slots[i], self.slots[j]) {
            (Some(si), Some(sj)) => op[(self.space.one_particle(si), self.space.one_particle(sj))],
            _ => czero(),
        })
    }
}

/// Single-particle matrix elements of the normal-ordered local operator `kind` at `site`.
pub fn fock_oracle(spec: LatticeSpec, kind: KernelKind, site: usize) -> Result<CMatrix> {
    if site >= spec.num_sites() {
        return Err(Error::OracleRefused(format!("site {site} out of range")));
    }
    let ops = LatticeFieldOperators::build(spec)?;
    Ok(ops.single_particle_block(&ops.local_operator(kind, site)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: f64) -> LatticeSpec {
        LatticeSpec::new(n, 1.0, m, Dispersion::Lattice).unwrap()
    }

    #[test]
    fn fock_dimension_counts_states() {
        // 1 + 4 + C(5,2)
        assert_eq!(FockSpace::new(4, 2).dim(), 15);
        assert_eq!(FockSpace::new(6, 2).dim(), 28);
    }

    #[test]
    fn commutator_is_canonical_below_truncation() {
        let ops = LatticeFieldOperators::build(spec(4, 1.0)).unwrap();
        let space = ops.space();
        let mut top_sector_deviation: f64 = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                let c = ops.canonical_commutator(j, k);
                let target = if j == k {
                    Complex64::new(0.0, 1.0)
                } else {
                    czero()
                };
                for col in 0..space.dim() {
                    for row in 0..space.dim() {
                        let want = if row == col { target } else { czero() };
                        let dev = (c[(row, col)] - want).norm();
                        if space.total_number(col) < 2 && space.total_number(row) < 2 {
                            assert!(dev < 1e-12, "j={j} k={k} row={row} col={col} dev={dev}");
                        } else {
                            top_sector_deviation = top_sector_deviation.max(dev);
                        }
                    }
                }
            }
        }
        assert!(top_sector_deviation > 1e-3);
    }

    #[test]
    fn vacuum_carries_no_energy() {
        let ops = LatticeFieldOperators::build(spec(5, 0.5)).unwrap();
        let vac = ops.space().vacuum();
        for j in 0..5 {
            assert!(ops.local_operator(KernelKind::T00, j)[(vac, vac)].norm() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_diagonal_on_one_particle_states() {
        let ops = LatticeFieldOperators::build(spec(4, 1.0)).unwrap();
        let block = ops.single_particle_block(&ops.hamiltonian());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { ops.frequencies()[i] } else { 0.0 };
                assert!((block[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        // Nyquist mode of the N = 4, a = 1 lattice
        assert!((ops.frequencies()[3] - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_or_continuum_lattices() {
        assert!(matches!(
            fock_oracle(spec(7, 1.0), KernelKind::T00, 0),
            Err(Error::OracleRefused(_))
        ));
        let cont = LatticeSpec::new(4, 1.0, 1.0, Dispersion::Continuum).unwrap();
        assert!(fock_oracle(cont, KernelKind::T00, 0).is_err());
    }
}
