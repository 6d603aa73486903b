use locpovm::geometry::fd::richardson_gradient;
use locpovm::geometry::{
    canonical_normal_field, connection_transform_check, density_covariant_derivative,
    metric_compatibility_deviation, pullback_metric, riemann, transform_density_vector, Chart,
    ChristoffelField, DensityVectorField, MetricField,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 100;

fn built_in_charts() -> Vec<Chart> {
    vec![
        Chart::identity(2),
        Chart::dilation(0.1).unwrap(),
        Chart::dilation(-0.4).unwrap(),
        Chart::rindler(1.0).unwrap(),
        Chart::rindler(0.3).unwrap(),
    ]
}

fn sample(chart: &Chart, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..POINTS).map(|_| chart.sample_primed(&mut rng)).collect()
}

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

#[test]
fn jacobian_matches_central_differences() {
    for chart in built_in_charts() {
        for p in sample(&chart, 11) {
            let x = chart.inverse(&p).unwrap();
            let j = chart.jacobian(&x).unwrap();
            let f = |q: &[f64]| chart.forward(q);
            let cols = richardson_gradient(&f, &x, 1e-4).unwrap();
            for (nu, col) in cols.iter().enumerate() {
                for (mu, v) in col.iter().enumerate() {
                    assert!((j[(mu, nu)] - v).abs() < 1e-6, "{chart:?} at {x:?}");
                }
            }
        }
    }
}

#[test]
fn forward_inverts_inverse() {
    for chart in built_in_charts() {
        for p in sample(&chart, 12) {
            let back = chart.forward(&chart.inverse(&p).unwrap()).unwrap();
            assert!(
                p.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-10),
                "{chart:?} at {p:?}"
            );
        }
    }
}

#[test]
fn levi_civita_is_metric_compatible() {
    for chart in built_in_charts() {
        let g = pullback_metric(&chart);
        for p in sample(&chart, 13) {
            let dev = metric_compatibility_deviation(&g, &p).unwrap();
            assert!(dev < 1e-6, "{chart:?} at {p:?}: {dev}");
        }
    }
}

#[test]
fn pulled_back_metrics_are_flat() {
    for chart in built_in_charts() {
        let gamma = ChristoffelField::new(pullback_metric(&chart));
        for p in sample(&chart, 14) {
            let r = riemann(&gamma, &p).unwrap();
            let worst = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(worst < 1e-5, "{chart:?} at {p:?}: {worst}");
        }
    }
}

#[test]
fn connection_transforms_inhomogeneously() {
    let flat = ChristoffelField::new(MetricField::minkowski(2));
    for chart in built_in_charts() {
        for w in [0.0, 0.5, 1.0] {
            let dev = connection_transform_check(&chart, &flat, w, &sample(&chart, 15)).unwrap();
            assert!(dev < 1e-6, "{chart:?} weight {w}: {dev}");
        }
    }
}

#[test]
fn cartesian_constant_densities_are_covariantly_constant() {
    let fields = [
        DensityVectorField::constant(vec![1.0, 0.0], 0.5),
        DensityVectorField::constant(vec![1.25, -0.75], 0.5),
        DensityVectorField::constant(vec![0.4, 0.1], 1.0),
    ];
    for chart in built_in_charts() {
        let gamma = ChristoffelField::new(pullback_metric(&chart));
        for field in &fields {
            let pushed = transform_density_vector(&chart, field).unwrap();
            for p in sample(&chart, 16).iter().take(25) {
                let d = density_covariant_derivative(&pushed, &gamma, p).unwrap();
                assert!(max_abs(&d) < 1e-6, "{chart:?} at {p:?}: {d}");
            }
        }
    }
}

#[test]
fn canonical_normal_has_unit_norm_where_lapse_and_volume_are_one() {
    // Rindler at x' = 0 has unit lapse and unit determinant
    let g = pullback_metric(&Chart::rindler(1.0).unwrap());
    for t in [-0.5, 0.0, 0.7] {
        let p = [t, 0.0];
        let n = canonical_normal_field(&g).at(&p).unwrap();
        let m = g.components(&p).unwrap();
        let norm =
            m[(0, 0)] * n[0] * n[0] + 2.0 * m[(0, 1)] * n[0] * n[1] + m[(1, 1)] * n[1] * n[1];
        assert!((norm + 1.0).abs() < 1e-13);
    }
}

#[test]
fn rindler_normal_is_not_covariantly_constant() {
    let metric = pullback_metric(&Chart::rindler(1.0).unwrap());
    let n = canonical_normal_field(&metric);
    let d = density_covariant_derivative(&n, &ChristoffelField::new(metric), &[0.0, 0.0]).unwrap();
    assert!(d.norm() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_transforms_compose(
        la in -0.5f64..0.5,
        acc in 0.2f64..1.5,
        t in -0.4f64..0.4,
        x in -0.5f64..0.5,
        n0 in 0.5f64..2.0,
        n1 in -1.0f64..1.0,
    ) {
        let a = Chart::dilation(la).unwrap();
        let b = Chart::rindler(acc).unwrap();
        let f = DensityVectorField::new(2, 0.5, move |p| Ok(vec![n0 + 0.1 * p[1], n1 - 0.2 * p[0]]));
        let stepwise = transform_density_vector(&b, &transform_density_vector(&a, &f).unwrap()).unwrap();
        let direct = transform_density_vector(&a.compose(&b).unwrap(), &f).unwrap();
        let p = [t, x];
        if let (Ok(u), Ok(v)) = (stepwise.at(&p), direct.at(&p)) {
            for (s, d) in u.iter().zip(&v) {
                prop_assert!((s - d).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn christoffels_are_symmetric(acc in 0.2f64..1.5, t in -0.5f64..0.5, x in -0.5f64..1.5) {
        let gamma = ChristoffelField::new(pullback_metric(&Chart::rindler(acc).unwrap()));
        let g = gamma.at(&[t, x]).unwrap();
        for a in 0..2 {
            prop_assert_eq!(g.get(a, 0, 1), g.get(a, 1, 0));
        }
    }
}
