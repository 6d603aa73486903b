//! Weighted vector densities: transforming the inertial normal into a chart, the
//! density connection, and its inhomogeneous transformation law.

use locpovm::geometry::{
    canonical_normal_field, connection_transform_check, density_connection,
    density_covariant_derivative, pullback_metric, transform_density_vector, Chart,
    ChristoffelField, DensityVectorField, MetricField,
};

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn main() -> locpovm::Result<()> {
    let inertial = DensityVectorField::constant(vec![1.0, 0.0], 0.5);
    let points: Vec<Vec<f64>> = (0..5)
        .map(|i| vec![0.1 * i as f64, -0.5 + 0.5 * i as f64])
        .collect();

    for chart in [Chart::dilation(0.1)?, Chart::rindler(1.0)?] {
        let metric = pullback_metric(&chart);
        let gamma = ChristoffelField::new(metric.clone());
        let pushed = transform_density_vector(&chart, &inertial)?;
        let canonical = canonical_normal_field(&metric);
        println!("{}", chart.label());
        for p in &points[..3] {
            let transported = density_covariant_derivative(&pushed, &gamma, p)?;
            let sliced = density_covariant_derivative(&canonical, &gamma, p)?;
            println!(
                "  {p:?}: |∇n| transported {:.2e}, canonical {:.2e}",
                max_abs(&transported),
                max_abs(&sliced)
            );
        }
        let g = density_connection(gamma, 0.5).at(&points[0])?;
        println!(
            "  (𝒢_1) at {:?}: [[{:.4}, {:.4}], [{:.4}, {:.4}]]",
            points[0],
            g.get(1, 0, 0),
            g.get(1, 0, 1),
            g.get(1, 1, 0),
            g.get(1, 1, 1)
        );
        let flat = ChristoffelField::new(MetricField::minkowski(2));
        println!(
            "  transformation law deviation {:.2e}",
            connection_transform_check(&chart, &flat, 0.5, &points)?
        );
    }
    Ok(())
}
