//! Localization density of a moving packet and the probability of finding it in
//! a few intervals as time passes.

use std::f64::consts::PI;

use locpovm::localization::{localization_density, localization_probability, QueryInterval};
use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    let length = 2.0 * PI;
    let basis = build_mode_basis(LatticeSpec::with_length(
        64,
        length,
        1.0,
        Dispersion::Continuum,
    )?);
    let state = make_wave_packet(basis, 2.0, 0.5, 3.0)?;

    let left = QueryInterval::new(0.0, PI)?;
    let right = QueryInterval::new(PI, length)?;
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>10}",
        "t", "peak x", "P(left)", "P(right)", "a·ΣΠ"
    );
    for step in 0..=6 {
        let t = 0.5 * step as f64;
        let field = localization_density(&state, t)?;
        println!(
            "{t:>5.1} {:>9.4} {:>9.5} {:>9.5} {:>10.3e}",
            field.grid[field.argmax()],
            localization_probability(&state, &left, t)?,
            localization_probability(&state, &right, t)?,
            field.total() - 1.0,
        );
    }
    Ok(())
}
