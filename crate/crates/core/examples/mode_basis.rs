//! Mode numbers, momenta and frequencies of a small lattice, and a Gaussian packet on it.
//!
//!     cargo run --example mode_basis

use std::f64::consts::PI;

use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    for dispersion in [Dispersion::Continuum, Dispersion::Lattice] {
        let basis = build_mode_basis(LatticeSpec::with_length(8, 2.0 * PI, 1.0, dispersion)?);
        println!("{} dispersion, N = 8, L = 2π, m = 1", dispersion.name());
        println!("{:>4} {:>10} {:>10}", "n", "k", "ω");
        for i in 0..basis.len() {
            println!(
                "{:>4} {:>10.5} {:>10.5}",
                basis.mode_numbers()[i],
                basis.momenta()[i],
                basis.frequencies()[i]
            );
        }
        println!();
    }

    let basis = build_mode_basis(LatticeSpec::with_length(
        32,
        2.0 * PI,
        1.0,
        Dispersion::Continuum,
    )?);
    let packet = make_wave_packet(basis.clone(), PI, 0.6, 2.0)?;
    println!("packet at x = π, width 0.6, k̄ = 2: |c_n|² by mode number");
    for (n, c) in basis.mode_numbers().iter().zip(packet.amplitudes()) {
        let weight = c.norm_sqr();
        if weight > 1e-4 {
            println!(
                "{n:>4} {weight:.5} {}",
                "#".repeat((weight * 100.0) as usize)
            );
        }
    }
    println!("norm = {:.15}", packet.norm_sqr());
    Ok(())
}
