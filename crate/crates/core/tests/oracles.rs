mod common;

use cga_core::formulations::{penalty_gradient, penalty_objective, portfolio_variance};
use cga_core::solvers::{
    markowitz_sweep, robust::robust_lp, solve_erc, solve_gmv, solve_lp, solve_mdp_dr, solve_mdp_rw, solve_qp,
    solve_robust, LpProblem, MultiStart, QpProblem,
};
use cga_core::{linalg, MarketEstimates, PenaltyMode, PenaltyParams};
use common::*;
use rand::Rng;

#[test]
fn gmv_matches_simplex_grid() {
    let mut rng = rng(11);
    for _ in 0..5 {
        let cov = random_covariance(&mut rng, 3, 0.1);
        let qp = QpProblem::simplex(cov.clone());
        let rep = solve_qp(&qp, &[1.0 / 3.0; 3], 50_000, 1e-13).unwrap();
        let (grid, _) = grid_min(3, 100, |x| cov.quad_form(x));
        assert!(rep.objective <= grid + 1e-12);
        assert!((rep.objective - grid).abs() <= 1e-3);
    }
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = rng(5);
    let mut checked = 0;
    for _ in 0..25 {
        let n = 5;
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a_ub: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let b_ub: Vec<f64> = (0..4).map(|_| rng.random_range(-0.3..1.0)).collect();
        let with_eq = rng.random::<bool>();
        let (a_eq, b_eq) = if with_eq {
            (vec![(0..n).map(|_| rng.random_range(0.0..1.0)).collect()], vec![rng.random_range(0.5..1.5)])
        } else {
            (vec![], vec![])
        };
        let p = LpProblem { c: c.clone(), a_ub, b_ub, a_eq, b_eq, bounds: vec![(0.0, 1.0); n] };
        let (g, h) = lp_as_inequalities(&p);
        match (solve_lp(&p), vertex_enumeration(&c, &g, &h)) {
            (Ok(sol), Some((best, _))) => {
                assert!((sol.objective - best).abs() <= 1e-8, "{} vs {best}", sol.objective);
                checked += 1;
            }
            (Err(cga_core::Error::Infeasible), None) => {}
            (lhs, rhs) => panic!("solver {lhs:?} disagrees with oracle {rhs:?}"),
        }
    }
    assert!(checked >= 10);
}

#[test]
fn robust_lp_matches_vertex_enumeration() {
    let mut rng = rng(17);
    for n in [3, 4] {
        let est = random_estimates(&mut rng, n);
        for gamma in [0.0, 1.0, 2.5, n as f64] {
            let p = robust_lp(&est, gamma);
            let (g, h) = lp_as_inequalities(&p);
            let (best, _) = vertex_enumeration(&p.c, &g, &h).unwrap();
            let sol = solve_robust(&est, gamma).unwrap();
            assert!((sol.report.objective - best).abs() <= 1e-8);
        }
        let nominal = solve_robust(&est, 0.0).unwrap();
        assert!((nominal.report.x.x[linalg::argmax(&est.r)] - 1.0).abs() < 1e-9);
        let adjusted: Vec<f64> = est.r.iter().zip(&est.s).map(|(r, s)| r - s).collect();
        let cautious = solve_robust(&est, n as f64).unwrap();
        assert!((cautious.report.x.x[linalg::argmax(&adjusted)] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn penalty_gradient_matches_central_differences() {
    let mut rng = rng(23);
    for mode in [PenaltyMode::Portfolio, PenaltyMode::PerAsset] {
        for _ in 0..50 {
            let n = rng.random_range(2..8);
            let est = random_estimates(&mut rng, n);
            let pp = PenaltyParams { alpha: 10.0, beta: 5.0, rp: rng.random_range(0.0..0.003) };
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let g = penalty_gradient(&x, &est, &pp, mode).unwrap();
            let fd = central_difference(|y| penalty_objective(y, &est, &pp, mode).unwrap(), &x, 1e-6);
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-8);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-4 * scale, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn variance_forms_agree() {
    let mut rng = rng(29);
    let est = random_estimates(&mut rng, 6);
    for _ in 0..100 {
        let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let quad = est.cov.quad_form(&x);
        assert!((quad - variance_double_sum(&x, &est)).abs() <= 1e-9);
        if quad >= 0.0 {
            assert!((portfolio_variance(&x, &est).unwrap() - quad).abs() <= 1e-15);
        }
    }
}

#[test]
fn erc_two_asset_closed_form_and_grid() {
    for rho in [-0.5, 0.0, 0.5] {
        let est = two_asset(0.15, 0.05, rho);
        let rep = solve_erc(&est, &MultiStart::default()).unwrap();
        assert!((rep.x.x[0] - 0.05 / 0.2).abs() <= 1e-3);
        let (_, grid_x) = grid_min(2, 1000, |x| cga_core::formulations::erc_objective(x, &est).unwrap());
        assert!((rep.x.x[0] - grid_x[0]).abs() <= 2e-3);
    }
}

#[test]
fn mdp_routes_agree_and_beat_grid() {
    let mut rng = rng(31);
    for _ in 0..4 {
        let est = random_estimates(&mut rng, 3);
        let dr = solve_mdp_dr(&est, &MultiStart::default()).unwrap();
        let rw = solve_mdp_rw(&est).unwrap();
        assert!((dr.objective - rw.report.objective).abs() <= 1e-4);
        let (neg, _) = grid_min(3, 100, |x| -cga_core::formulations::diversification_ratio(x, &est).unwrap_or(0.0));
        assert!(dr.objective >= -neg - 1e-9);
    }
}

#[test]
fn multistart_never_worse_than_equal_weight_start() {
    let mut rng = rng(37);
    for _ in 0..5 {
        let est = random_estimates(&mut rng, 5);
        let single = solve_gmv(&est, &MultiStart::single()).unwrap();
        let multi = solve_gmv(&est, &MultiStart::default()).unwrap();
        assert!(multi.objective <= single.objective);
        let single = solve_erc(&est, &MultiStart::single()).unwrap();
        let multi = solve_erc(&est, &MultiStart::default()).unwrap();
        assert!(multi.objective <= single.objective);
        let a = markowitz_sweep(&est, 5, &MultiStart::single()).unwrap();
        let b = markowitz_sweep(&est, 5, &MultiStart::default()).unwrap();
        for (s, m) in a.iter().zip(&b) {
            if s.is_optimal() && m.is_optimal() {
                assert!(m.objective <= s.objective + 1e-12);
            }
        }
    }
}

#[test]
fn optimal_reports_are_long_only_and_budgeted() {
    let mut rng = rng(41);
    let est: MarketEstimates = random_estimates(&mut rng, 6);
    let ms = MultiStart::default();
    let mut reports = vec![solve_gmv(&est, &ms).unwrap(), solve_mdp_dr(&est, &ms).unwrap(), solve_mdp_rw(&est).unwrap().report, solve_erc(&est, &ms).unwrap()];
    reports.extend(markowitz_sweep(&est, 15, &ms).unwrap());
    reports.extend(cga_core::solvers::robust_sweep(&est, 0.5).unwrap().into_iter().map(|s| s.report));
    for r in reports.iter().filter(|r| r.is_optimal()) {
        assert!(r.x.x.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
        assert!((r.x.sum() - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn markowitz_matches_constrained_grid() {
    let mut rng = rng(43);
    for _ in 0..5 {
        let est = random_estimates(&mut rng, 3);
        for rp in cga_core::solvers::markowitz::sweep_targets(&est, 6).unwrap() {
            let rep = cga_core::solvers::solve_markowitz(&est, rp, &MultiStart::default()).unwrap();
            assert!(rep.is_optimal());
            assert!(linalg::dot(&est.r, &rep.x.x) >= rp - 1e-6);
            let (grid, _) =
                grid_min(3, 200, |x| if linalg::dot(&est.r, x) >= rp { est.cov.quad_form(x) } else { f64::INFINITY });
            if grid.is_finite() {
                assert!(rep.objective <= grid + 1e-12, "{} vs {grid}", rep.objective);
            }
            assert!(rep.objective >= grid.min(f64::MAX) - 1e-3);
        }
    }
}
