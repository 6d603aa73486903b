//! Scans two chart families for the size of the discrepancy terms.

use std::f64::consts::PI;

use locpovm::covariance::{metric_condition_scan, ChartFamily};
use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    let basis = build_mode_basis(LatticeSpec::with_length(
        64,
        2.0 * PI,
        1.0,
        Dispersion::Continuum,
    )?);
    let state = make_wave_packet(basis, PI, 0.5, 1.0)?;
    let grids = [
        (
            ChartFamily::Dilation,
            vec![-0.2, -0.1, 0.0, 0.05, 0.1, 0.2, 0.5],
        ),
        (ChartFamily::Rindler, vec![0.25, 0.5, 1.0, 2.0]),
    ];
    for (family, params) in grids {
        println!("{}", family.name());
        for row in metric_condition_scan(family, &params, &state)? {
            println!(
                "  {:>6} max|disc| {:.4e}  max dev modified {:.2e}{}",
                row.parameter,
                row.max_abs_discrepancy,
                row.max_dev_modified,
                if row.non_inertial {
                    "  (non-inertial)"
                } else {
                    ""
                }
            );
        }
    }
    Ok(())
}
