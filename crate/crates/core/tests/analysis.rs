use proptest::prelude::*;
use quasitile::analysis::*;
use quasitile::tiling::generate;
use quasitile::windows::default_offset;
use quasitile::Family;

fn radii(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

#[test]
fn poisson_control_is_calibrated() {
    let region = Disc::new([0.0; 2], 180.0);
    let disc = Disc::new([0.0; 2], 150.0);
    let pts = calibrate(Control::Poisson { density: 1.0 }, region, disc, &radii(1.0, 15.0, 1.0), 4000, 24, 11).unwrap();
    for p in &pts {
        assert!(p.deviation().abs() < 3.0, "{p:?}");
    }
}

#[test]
fn binomial_control_matches_its_analytic_variance() {
    let region = Disc::new([0.0; 2], 40.0);
    let disc = Disc::new([0.0; 2], 25.0);
    let c = Control::Binomial { points: 4000 };
    let pts = calibrate(c, region, disc, &radii(2.0, 14.0, 2.0), 3000, 24, 5).unwrap();
    for p in &pts {
        assert!(p.expected < 1.0);
        assert!(p.deviation().abs() < 3.0, "{p:?}");
    }
}

#[test]
fn vertex_sets_are_hyperuniform() {
    let t = generate(Family::P3, 130.0, 0, default_offset(), [0.0, 0.0]).unwrap();
    let (pts, support) = tiling_points(&t);
    let c = number_variance(&pts, support, &radii(1.0, 60.0, 1.0), 4000, Disc::new([0.0; 2], 60.0), 7).unwrap();
    let rho = vertex_density(&t);
    // a Poisson set would keep σ²/(ρπR²) at 1
    assert!(variance_ratio(&c, rho, 10.0, 60.0).unwrap() < 0.25);
    let f = fit_order_metric(&c, 10.0, 60.0).unwrap();
    assert!(f.b > 0.0);
    let nb = f.b / (std::f64::consts::PI * rho / 4.0).sqrt();
    assert!((nb - 0.59).abs() < 0.06, "{nb}");
}

#[test]
fn densities_and_coverage_at_radius_100() {
    let p3 = generate(Family::P3, 100.0, 0, default_offset(), [0.0, 0.0]).unwrap();
    let p4 = generate(Family::P4, 100.0, 0, default_offset(), [0.0, 0.0]).unwrap();
    let m3 = pattern_metrics(&p3, None).unwrap();
    let m4 = pattern_metrics(&p4, None).unwrap().relative_to(&m3);
    assert!((m4.rho / m3.rho - 1.0).abs() < 0.005);
    let tau2 = quasitile::golden::TAU.powi(2);
    assert!((m4.s1_ratio.unwrap() / tau2 - 1.0).abs() < 0.02);
    let cov = m4.decagon_coverage.unwrap();
    assert!((cov / (2.0 / 5f64.sqrt()) - 1.0).abs() < 0.005, "{cov}");
    assert!(m3.decagon_coverage.is_none());
}

#[test]
fn common_seed_runs_are_reproducible() {
    let t = generate(Family::P4, 60.0, 0, default_offset(), [0.0, 0.0]).unwrap();
    let (pts, support) = tiling_points(&t);
    let run = |seed| number_variance(&pts, support, &radii(1.0, 20.0, 0.5), 500, Disc::new([0.0; 2], 30.0), seed).unwrap();
    assert_eq!(run(4), run(4));
    assert_ne!(run(4).variance, run(5).variance);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn variance_is_nonnegative_and_mean_matches_brute_force(
        n in 0usize..400,
        seed in 0u64..1000,
        r in 0.5f64..8.0,
    ) {
        let region = Disc::new([0.0; 2], 20.0);
        let pts = Control::Binomial { points: n }.sample(region, seed);
        let rs = [r, r + 1.0, r + 3.5];
        let disc = Disc::new([1.0, -1.0], 20.0 - r - 5.0);
        let c = number_variance(&pts, region, &rs, 40, disc, seed).unwrap();
        prop_assert!(c.variance.iter().all(|v| *v >= 0.0));
        prop_assert!(c.mean.windows(2).all(|w| w[0] <= w[1]));
        let idx = PointIndex::new(&pts, 2.0);
        for (k, rk) in rs.iter().enumerate() {
            let mut total = 0usize;
            for i in 0..40 {
                let p = sample_center(&disc, seed, i);
                let brute = pts.iter().filter(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < *rk).count();
                prop_assert_eq!(idx.count_within(p, *rk), brute);
                total += brute;
            }
            prop_assert!((c.mean[k] - total as f64 / 40.0).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_models_are_recovered(b in 0.1f64..2.0, c in -5.0f64..5.0) {
        let rs = radii(10.0, 240.0, 1.0);
        let curve = VarianceCurve {
            variance: rs.iter().map(|r| (b + c / r) * r).collect(),
            lambda: rs.iter().map(|r| b + c / r).collect(),
            mean: vec![0.0; rs.len()],
            radii: rs,
            samples: 2,
            seed: 0,
            sampling_disc_radius: 1.0,
        };
        let f = fit_order_metric(&curve, 10.0, 240.0).unwrap();
        prop_assert!((f.b - b).abs() < 1e-10 && (f.c - c).abs() < 1e-9);
    }
}
