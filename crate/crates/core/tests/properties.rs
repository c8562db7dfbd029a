mod common;

use cga_core::formulations::{diversification_ratio, risk_contributions};
use cga_core::market::{estimate, ReturnKind, ReturnMatrix};
use cga_core::solvers::{solve_erc, solve_gmv, solve_mdp_dr, MultiStart};
use proptest::prelude::*;

fn ladder(seed: u64) -> impl Strategy<Value = (Vec<Vec<f64>>, u64)> {
    (3usize..6, 30usize..60).prop_flat_map(move |(n, t)| {
        (prop::collection::vec(prop::collection::vec(-0.05f64..0.05, n), t), Just(seed))
    })
}

fn closes_from(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows[0].len();
    let mut price = vec![100.0; n];
    let mut out = vec![price.clone()];
    for r in rows {
        for (p, v) in price.iter_mut().zip(r) {
            *p *= 1.0 + v;
        }
        out.push(price.clone());
    }
    (0..n).map(|i| out.iter().map(|row| row[i]).collect()).collect()
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("A{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covariance_is_symmetric_psd((rows, _) in ladder(0), x in prop::collection::vec(-1.0f64..1.0, 6)) {
        let closes = closes_from(&rows);
        let n = rows[0].len();
        let rm = ReturnMatrix::from_closes(ids(n), &closes, ReturnKind::Arithmetic).unwrap();
        let est = estimate(&rm).unwrap();
        prop_assert!(est.cov.is_symmetric(0.0));
        prop_assert!(est.cov.quad_form(&x[..n]) >= -1e-12);
    }

    #[test]
    fn log_returns_never_exceed_arithmetic((rows, _) in ladder(0)) {
        let closes = closes_from(&rows);
        let n = rows[0].len();
        let a = ReturnMatrix::from_closes(ids(n), &closes, ReturnKind::Arithmetic).unwrap();
        let l = ReturnMatrix::from_closes(ids(n), &closes, ReturnKind::Log).unwrap();
        for (p, q) in l.data.as_slice().iter().zip(a.data.as_slice()) {
            prop_assert!(*p <= *q + 1e-15);
        }
    }

    #[test]
    fn diversification_ratio_at_least_one(seed in 0u64..10_000, raw in prop::collection::vec(0.0f64..1.0, 5)) {
        let mut rng = common::rng(seed);
        let est = common::random_estimates(&mut rng, 5);
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-3);
        let x: Vec<f64> = raw.iter().map(|v| v / total).collect();
        prop_assert!(diversification_ratio(&x, &est).unwrap() >= 1.0 - 1e-12);
        let c = risk_contributions(&x, &est).unwrap();
        let var = est.cov.quad_form(&x);
        prop_assert!((c.iter().sum::<f64>() - var).abs() <= 1e-12 * var.max(1e-300) + 1e-18);
    }
}

#[test]
fn permutation_equivariance() {
    let perm = [3, 0, 4, 1, 2];
    for seed in 0..5 {
        let mut rng = common::rng(100 + seed);
        let est = common::random_estimates(&mut rng, 5);
        let p = est.permuted(&perm);
        let ms = MultiStart::default();
        for solve in [solve_gmv, solve_erc, solve_mdp_dr] {
            let a = solve(&est, &ms).unwrap();
            let b = solve(&p, &ms).unwrap();
            for (k, &src) in perm.iter().enumerate() {
                assert!((b.x.x[k] - a.x.x[src]).abs() <= 1e-6, "seed {seed}");
            }
        }
    }
}
