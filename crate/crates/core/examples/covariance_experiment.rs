//! Two charts share the t = 0 surface, so they must assign the same localization
//! probabilities there. The naive density fails this in a dilating chart; the
//! connection-modified density passes.

use std::f64::consts::PI;

use locpovm::covariance::{build_scenario, transport_deviation, CovarianceExperiment};
use locpovm::geometry::Chart;
use locpovm::localization::QueryInterval;
use locpovm::mode_field::{build_mode_basis, make_wave_packet, Dispersion, LatticeSpec};

fn main() -> locpovm::Result<()> {
    let n = 64;
    let basis = build_mode_basis(LatticeSpec::with_length(
        n,
        2.0 * PI,
        1.0,
        Dispersion::Continuum,
    )?);
    let state = make_wave_packet(basis, PI, 0.5, 1.0)?;

    for chart in [
        Chart::identity(2),
        Chart::dilation(0.1)?,
        Chart::rindler(1.0)?,
    ] {
        let scenario = build_scenario(chart)?;
        let experiment = CovarianceExperiment::new(&state, &scenario)?;
        println!(
            "{} ({})",
            scenario.chart.label(),
            if scenario.is_non_inertial() {
                "non-inertial"
            } else {
                "inertial"
            }
        );
        println!(
            "  {:>13} {:>10} {:>10} {:>10}",
            "cells", "Cartesian", "dev naive", "dev mod."
        );
        for k in 0..8 {
            let r = experiment.check(&QueryInterval::cells(8 * k, 8, 2.0 * PI / n as f64)?)?;
            println!(
                "  {:>5}..{:<6} {:>10.6} {:>10.2e} {:>10.2e}",
                8 * k,
                8 * k + 8,
                r.prob_cartesian,
                r.dev_naive,
                r.dev_modified
            );
        }
        println!(
            "  pointwise transport deviation {:.2e}",
            transport_deviation(&state, &scenario)?
        );
    }
    Ok(())
}
