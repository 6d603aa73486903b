//! The localization current and how well it obeys continuity.
//!
//! With the continuum dispersion the residual `∂_t J⁰ + ∂_x J¹` is at rounding level.
//! With the lattice dispersion it is a discretization error that halves as N doubles.

use std::f64::consts::PI;

use locpovm::localization::{continuity_residual, localization_current};
use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    let basis = build_mode_basis(LatticeSpec::with_length(
        64,
        2.0 * PI,
        1.0,
        Dispersion::Continuum,
    )?);
    let state = make_wave_packet(basis, PI, 0.5, 1.5)?;
    let (j0, j1) = localization_current(&state, 0.0)?;
    let flux: f64 = j1.values.iter().sum::<f64>() * j1.spacing;
    println!(
        "∫J⁰ = {:.12}, ∫J¹ = {flux:.6} (mean velocity of the packet)",
        j0.total()
    );

    for dispersion in [Dispersion::Continuum, Dispersion::Lattice] {
        for n in [64, 128, 256] {
            let basis = build_mode_basis(LatticeSpec::with_length(n, 2.0 * PI, 1.0, dispersion)?);
            let state = make_wave_packet(basis, PI, 0.5, 1.5)?;
            let report = continuity_residual(&state, 0.5)?;
            println!(
                "{:>9} N = {n:>3}: max residual {:.3e} ({:?})",
                dispersion.name(),
                report.max_abs(),
                report.contract
            );
        }
    }
    Ok(())
}
