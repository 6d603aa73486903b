//! Where the linear and naive localization forms part ways in a dilating chart.

use std::f64::consts::PI;

use locpovm::covariance::{build_scenario, discrepancy_field};
use locpovm::geometry::Chart;
use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    let basis = build_mode_basis(LatticeSpec::with_length(
        64,
        2.0 * PI,
        1.0,
        Dispersion::Continuum,
    )?);
    let state = make_wave_packet(basis, PI, 0.5, 1.0)?;
    let scenario = build_scenario(Chart::dilation(0.1)?)?;
    let r = discrepancy_field(&state, &scenario)?;

    println!(
        "{:>7} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "x", "naive", "linear", "φ² term", "πφ term", "∂φφ term"
    );
    for j in (0..r.discrepancy.len()).step_by(4) {
        println!(
            "{:>7.4} {:>11.4e} {:>11.4e} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.discrepancy.grid[j],
            r.naive_form.values[j],
            r.linear_form.values[j],
            r.term_phi2.values[j],
            r.term_piphi.values[j],
            r.term_dphiphi.values[j],
        );
    }
    println!("max |discrepancy| = {:.4e}", r.discrepancy.max_abs());
    println!(
        "max |discrepancy - Σ terms| = {:.1e}",
        r.decomposition_residual()
    );
    Ok(())
}
