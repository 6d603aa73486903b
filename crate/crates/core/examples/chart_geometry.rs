//! Metrics, Christoffel symbols and canonical normals of the built-in charts, plus a
//! custom chart given as expressions.

use std::collections::BTreeMap;

use locpovm::geometry::{canonical_normal_density, christoffel, pullback_metric, Chart};

fn report(chart: &Chart, point: [f64; 2]) -> locpovm::Result<()> {
    let metric = pullback_metric(chart);
    let g = metric.components(&point)?;
    let gamma = christoffel(&metric, &point)?;
    let n = canonical_normal_density(&metric, &point)?;
    println!("{} at (t', x') = {point:?}", chart.label());
    println!(
        "  g = [[{:.5}, {:.5}], [{:.5}, {:.5}]]",
        g[(0, 0)],
        g[(0, 1)],
        g[(1, 0)],
        g[(1, 1)]
    );
    for a in 0..2 {
        println!(
            "  Γ^{a}: {:>9.5} {:>9.5} {:>9.5}",
            gamma.get(a, 0, 0),
            gamma.get(a, 0, 1),
            gamma.get(a, 1, 1)
        );
    }
    println!("  n = ({:.6}, {:.6})", n[0], n[1]);
    Ok(())
}

fn main() -> locpovm::Result<()> {
    report(&Chart::identity(2), [0.3, 1.0])?;
    report(&Chart::dilation(0.1)?, [0.0, 1.5])?;
    report(&Chart::rindler(1.0)?, [0.0, 0.0])?;
    report(&Chart::rindler(1.0)?, [0.2, 0.5])?;

    let params = BTreeMap::from([("lam".to_string(), 0.1)]);
    let custom = Chart::from_expressions(["t", "exp(lam*t)*x"], ["t", "exp(-lam*t)*x"], &params)?;
    report(&custom, [0.0, 1.5])?;
    Ok(())
}
