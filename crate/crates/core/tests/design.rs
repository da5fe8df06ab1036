//! Deployment solvers end to end, against brute-force oracles.

use uavcov::analytic::{coverage_rayleigh_n4_closed, rho_closed_n4};
use uavcov::channel::{DeploymentParams, EnvironmentParams, RadioParams};
use uavcov::montecarlo::McConfig;
use uavcov::optimize::{
    coverage_density_approx, density_coeffs, optimal_density_closed, optimal_density_numeric, optimal_height,
    HeightEvaluator, HeightPoint, OptMethod,
};
use uavcov::quadrature::QuadratureConfig;
use uavcov::units::{beta0_from_snr_db, db_to_linear, per_km2_to_per_m2};

fn analytic_with_fallback(trials: u64) -> HeightEvaluator {
    HeightEvaluator::Analytic {
        quad: QuadratureConfig::default(),
        fallback: McConfig::default().with_trials(trials),
    }
}

#[test]
fn optimal_height_falls_as_snr_rises() {
    let env = EnvironmentParams::sui_urban();
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    let ev = analytic_with_fallback(10_000);
    let optima: Vec<f64> = [0.0, 10.0, 20.0, 30.0]
        .iter()
        .map(|&snr| {
            let radio = RadioParams::rayleigh(db_to_linear(-15.0), beta0_from_snr_db(snr));
            optimal_height(&dep, &radio, &env, &ev, (20.0, 600.0))
                .unwrap()
                .optimum
                .argument
        })
        .collect();
    assert!(optima.windows(2).all(|w| w[1] <= w[0]), "{optima:?}");
    assert!(optima[3] < optima[0] - 100.0, "{optima:?}");
}

#[test]
fn low_snr_optimum_is_interior() {
    let env = EnvironmentParams::sui_urban();
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    for snr in [0.0, -5.0] {
        let radio = RadioParams::rayleigh(db_to_linear(-15.0), beta0_from_snr_db(snr));
        let h = optimal_height(&dep, &radio, &env, &HeightEvaluator::analytic(), (20.0, 600.0)).unwrap();
        let z = h.optimum.argument;
        assert!(z > 25.0 && z < 595.0, "SNR {snr}: {z}");
        // beats every scanned point, and the exponent there is at or next to the clamp
        assert!(h.curve.iter().all(|p| p.coverage.value <= h.optimum.value));
        assert!(h.ple < 2.01);
    }
}

#[test]
fn height_search_with_fallback_reports_it() {
    // above 0 dB SNR the n = 2 stretch above ~351 m needs simulation
    let env = EnvironmentParams::sui_urban();
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    let radio = RadioParams::rayleigh(db_to_linear(-15.0), beta0_from_snr_db(20.0));
    let h = optimal_height(&dep, &radio, &env, &analytic_with_fallback(2_000), (300.0, 400.0)).unwrap();
    assert!(h.optimum.fallback);
    let (sim, quad): (Vec<&HeightPoint>, Vec<&HeightPoint>) = h.curve.iter().partition(|p| p.fallback);
    assert!(sim.iter().all(|p| p.ple == 2.0));
    assert!(quad.iter().all(|p| p.ple > 2.0));
}

#[test]
fn numeric_density_matches_dense_grid() {
    let env = EnvironmentParams::sui_urban().with_fixed_ple(4.0);
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    for (theta_db, snr) in [(-10.0, 20.0), (0.0, 40.0), (10.0, 60.0)] {
        let radio = RadioParams::rayleigh(db_to_linear(theta_db), beta0_from_snr_db(snr));
        let bounds = (per_km2_to_per_m2(0.01), per_km2_to_per_m2(100.0));
        let opt = optimal_density_numeric(&dep, &radio, &env, bounds).unwrap();
        assert_eq!(opt.method, OptMethod::GoldenSection);
        let f = |l: f64| {
            coverage_rayleigh_n4_closed(&dep.with_density(l), &radio, &env)
                .unwrap()
                .value
        };
        let (a, b) = (bounds.0.ln(), bounds.1.ln());
        let grid_best = (0..20_001)
            .map(|i| (a + (b - a) * i as f64 / 20_000.0).exp())
            .max_by(|x, y| f(*x).total_cmp(&f(*y)))
            .unwrap();
        assert!(
            (opt.argument / grid_best - 1.0).abs() < 1e-3,
            "θ {theta_db}: {} vs {grid_best}",
            opt.argument
        );
        assert!(opt.value >= f(grid_best) - 1e-12);
    }
}

#[test]
fn closed_density_root_maximizes_its_own_curve_only() {
    // the cubic root is the exact argmax of the approximate curve, not of the exact one
    let env = EnvironmentParams::sui_urban().with_fixed_ple(4.0);
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    let radio = RadioParams::rayleigh(db_to_linear(0.0), beta0_from_snr_db(40.0));
    let k = density_coeffs(100.0, radio.theta, radio.beta0, 100.0, rho_closed_n4(radio.theta)).unwrap();
    let closed = optimal_density_closed(&k).unwrap().optimum.argument;
    let g = |l: f64| coverage_density_approx(l, &k).value;
    assert!(g(closed) > g(closed * 1.0001) && g(closed) > g(closed * 0.9999));
    let f = |l: f64| {
        coverage_rayleigh_n4_closed(&dep.with_density(l), &radio, &env)
            .unwrap()
            .value
    };
    assert!(f(closed * 1.01) > f(closed));
}
