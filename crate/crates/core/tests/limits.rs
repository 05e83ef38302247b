use auction_core::path::{build_path, limit_curves, sigma_bounds_model1};
use auction_core::recursion::solve;
use auction_core::{EquilibriumPath, MarketParams, ModelKind};

const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn equilibrium(model: ModelKind, n: usize) -> (MarketParams, EquilibriumPath) {
    let p = MarketParams::new(1.0, 0.5, n).unwrap();
    let e = build_path(&solve(model, &p).unwrap(), &p).unwrap();
    (p, e)
}

fn index(n: usize, t: f64) -> usize {
    (n as f64 * t).floor() as usize
}

#[test]
fn neutral_converges_to_kyle_limit() {
    let (p, e) = equilibrium(ModelKind::RiskNeutral, 1000);
    let lim = limit_curves(ModelKind::RiskNeutral, &p, &GRID).unwrap();
    for (i, &t) in GRID.iter().enumerate() {
        let k = index(1000, t);
        assert!(
            (e.sigma(k) / p.sigma0_sq - (1.0 - t)).abs() < 0.01,
            "Σ at t={t}"
        );
        assert!(
            (e.lambda(k) * p.sigma_u / p.sigma0_sq.sqrt() - 1.0).abs() < 0.02,
            "λ at t={t}"
        );
        assert!((e.lambda(k) / lim.lambda_lim[i] - 1.0).abs() < 0.02);
    }
}

#[test]
fn seeking_converges_to_cube_root_decay() {
    let (p, e) = equilibrium(ModelKind::RiskSeeking, 1000);
    let lim = limit_curves(ModelKind::RiskSeeking, &p, &GRID).unwrap();
    for (i, &t) in GRID.iter().enumerate() {
        let k = index(1000, t);
        assert!(
            (e.sigma(k) / p.sigma0_sq - (1.0 - t).cbrt()).abs() < 0.02,
            "Σ at t={t}"
        );
        assert!((e.sigma(k) - lim.sigma_lim[i]).abs() < 0.02);
    }
}

#[test]
fn averse_sigma_inside_envelope() {
    for n in [5usize, 20, 100] {
        let p = MarketParams::new(1.0, 0.5, n).unwrap();
        let c = solve(ModelKind::RiskAverse, &p).unwrap();
        let e = build_path(&c, &p).unwrap();
        let bounds = sigma_bounds_model1(&p, c.c(1), c.c(n - 1)).unwrap();
        for k in 1..n {
            assert!(bounds.contains(k, e.sigma(k)), "N={n} n={k}");
        }
        if n > 2 {
            // strict on the upper side past the first period
            for k in 2..n {
                assert!(e.sigma(k) < bounds.upper[k]);
            }
        }
    }
}

#[test]
fn averse_whole_horizon_upper_bound_uses_solved_c1() {
    let p = MarketParams::new(1.0, 0.5, 100).unwrap();
    let c = solve(ModelKind::RiskAverse, &p).unwrap();
    let bounds = sigma_bounds_model1(&p, c.c(1), c.c(99)).unwrap();
    let expected = (-100.0 * (1.0 + c.c(1) * c.c(1)).ln()).exp();
    assert!((bounds.upper[100] - expected).abs() <= 1e-13 * expected);
}

#[test]
fn scaled_coefficients_at_4096() {
    let n = 4096;
    let dt = 1.0 / n as f64;
    let k = index(n, 0.5);
    for model in [
        ModelKind::RiskAverse,
        ModelKind::RiskNeutral,
        ModelKind::RiskSeeking,
    ] {
        let p = MarketParams::new(1.0, 0.5, n).unwrap();
        let c = solve(model, &p).unwrap();
        let lim = limit_curves(model, &p, &[0.5]).unwrap();
        let scaled = c.c(k) / dt.powf(lim.scaling_exponent());
        let rel = (scaled / lim.c_scaled[0] - 1.0).abs();
        let tol = if model == ModelKind::RiskAverse {
            0.10
        } else {
            0.02
        };
        assert!(
            rel < tol,
            "{model}: scaled c = {scaled}, limit {}",
            lim.c_scaled[0]
        );
    }
}

#[test]
fn averse_decay_steepens_with_more_periods() {
    // finite-N trend behind the immediate-revelation limit
    let at_half = |n: usize| equilibrium(ModelKind::RiskAverse, n).1.sigma(n / 2);
    assert!(at_half(20) < at_half(5));
    assert!(at_half(100) < at_half(20));
    assert!(at_half(1000) < at_half(100));
}
