//! Compares the analytic single-particle kernels with brute-force matrices built in a
//! truncated Fock space on a four-site lattice.

use locpovm::mode_field::{
    build_kernel, build_mode_basis, fock_oracle, Dispersion, KernelKind, LatticeSpec,
};

fn main() -> locpovm::Result<()> {
    let spec = LatticeSpec::new(4, 1.0, 0.5, Dispersion::Lattice)?;
    let basis = build_mode_basis(spec);
    println!("N = 4, a = 1, m = 0.5, lattice dispersion");
    for kind in KernelKind::ALL {
        let kernel = build_kernel(&basis, kind);
        let mut worst = 0.0f64;
        for (site, x) in basis.grid().into_iter().enumerate() {
            let brute = fock_oracle(spec, kind, site)?;
            let diff = brute - kernel.matrix_at(x, 0.0);
            worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        println!("{:>13}: max deviation {worst:.2e}", kind.name());
    }

    // The continuum dispersion has no positional-lattice counterpart.
    let continuum = LatticeSpec::new(4, 1.0, 0.5, Dispersion::Continuum)?;
    if let Err(e) = fock_oracle(continuum, KernelKind::T00, 0) {
        println!("continuum dispersion: {e}");
    }
    Ok(())
}
