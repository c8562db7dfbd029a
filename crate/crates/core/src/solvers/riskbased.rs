//! Risk-based allocations: equal weights, minimum variance, most diversified
//! (two routes) and equal risk contribution.

use alloc::vec;
use alloc::vec::Vec;

use super::projection::BoxHyperplane;
use super::qp::{solve_qp, QpProblem};
use super::spg::{minimize, Objective, SpgOptions};
use super::{MultiStart, SolveReport, SolveStatus};
use crate::error::{Error, Result};
use crate::formulations::{diversification_ratio, equal_weights, erc_objective, risk_contributions, WeightVector};
use crate::linalg::dot;
use crate::market::MarketEstimates;

const QP_MAX_ITER: usize = 50_000;
const QP_TOL: f64 = 1e-13;

pub fn solve_ew(n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::BadDimension("equal weights need at least one asset".into()));
    }
    Ok(WeightVector::new(equal_weights(n)))
}

fn best_report(reports: impl IntoIterator<Item = SolveReport>, lower_is_better: bool) -> SolveReport {
    let mut best: Option<SolveReport> = None;
    let mut iterations = 0;
    for r in reports {
        iterations += r.iterations;
        let better = match &best {
            None => true,
            Some(b) if lower_is_better => r.objective < b.objective,
            Some(b) => r.objective > b.objective,
        };
        if better {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one start");
    best.iterations = iterations;
    best
}

/// Global minimum variance over the long-only simplex.
pub fn solve_gmv(est: &MarketEstimates, starts: &MultiStart) -> Result<SolveReport> {
    let qp = QpProblem::simplex(est.cov.clone());
    let reports = starts
        .points(est.n)
        .iter()
        .map(|s| solve_qp(&qp, s, QP_MAX_ITER, QP_TOL))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_report(reports, true))
}

fn check_risk(est: &MarketEstimates) -> Result<()> {
    if est.s.iter().all(|&s| !(s > 0.0)) {
        Err(Error::DegenerateRisk)
    } else {
        Ok(())
    }
}

struct NegDiversification<'a>(&'a MarketEstimates);

impl Objective for NegDiversification<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let var = self.0.cov.quad_form(x);
        if !(var > 0.0) {
            return f64::INFINITY;
        }
        -dot(&self.0.s, x) / libm::sqrt(var)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let var = self.0.cov.quad_form(x);
        if !(var > 0.0) {
            g.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let vol = libm::sqrt(var);
        let avg = dot(&self.0.s, x);
        self.0.cov.mul_vec_into(x, g);
        for (gi, si) in g.iter_mut().zip(&self.0.s) {
            *gi = -(si / vol - avg * *gi / (var * vol));
        }
    }
}

/// Most diversified portfolio by direct maximization of the diversification ratio.
pub fn solve_mdp_dr(est: &MarketEstimates, starts: &MultiStart) -> Result<SolveReport> {
    check_risk(est)?;
    let set = BoxHyperplane::simplex(est.n);
    let opts = SpgOptions { max_iter: QP_MAX_ITER, tol: 1e-12 };
    let f = NegDiversification(est);
    let reports = starts.points(est.n).into_iter().map(|s| {
        let res = minimize(&f, &set, &s, &opts);
        SolveReport {
            objective: -res.value,
            status: if res.converged { SolveStatus::Optimal } else { SolveStatus::IterationLimit },
            x: WeightVector::new(res.x),
            iterations: res.iterations,
        }
    });
    Ok(best_report(reports, false))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdpRwSolution {
    /// Budget-normalized weights; `objective` is their diversification ratio.
    pub report: SolveReport,
    /// Minimizer of `y'Σy` subject to `s'y = 1, y >= 0`, before normalization.
    pub risk_weighted: Vec<f64>,
}

/// Most diversified portfolio through the risk-weighted variance program.
pub fn solve_mdp_rw(est: &MarketEstimates) -> Result<MdpRwSolution> {
    check_risk(est)?;
    let n = est.n;
    let qp = QpProblem {
        q: est.cov.clone(),
        c: vec![0.0; n],
        eq: vec![(est.s.clone(), 1.0)],
        bounds: vec![(0.0, f64::INFINITY); n],
    };
    let total: f64 = est.s.iter().sum();
    let start = vec![1.0 / total; n];
    let rep = solve_qp(&qp, &start, QP_MAX_ITER, QP_TOL * 1e-2)?;
    let y = rep.x.x;
    let mass: f64 = y.iter().sum();
    let x: Vec<f64> = y.iter().map(|v| v / mass).collect();
    let dr = diversification_ratio(&x, est)?;
    Ok(MdpRwSolution {
        report: SolveReport { x: WeightVector::new(x), objective: dr, status: rep.status, iterations: rep.iterations },
        risk_weighted: y,
    })
}

/// Pairwise risk-contribution dispersion, scaled by the squared equal-weight variance.
struct RiskParity<'a> {
    est: &'a MarketEstimates,
    scale: f64,
}

impl Objective for RiskParity<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let sx = self.est.cov.mul_vec(x);
        let n = x.len() as f64;
        let (mut sum, mut sq) = (0.0, 0.0);
        for (a, b) in x.iter().zip(&sx) {
            let c = a * b / self.scale;
            sum += c;
            sq += c * c;
        }
        // sum_ij (c_i - c_j)^2 = 2n sum c^2 - 2 (sum c)^2
        (2.0 * n * sq - 2.0 * sum * sum).max(0.0)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let n = x.len();
        let sx = self.est.cov.mul_vec(x);
        let c: Vec<f64> = x.iter().zip(&sx).map(|(a, b)| a * b / self.scale).collect();
        let sum: f64 = c.iter().sum();
        let w: Vec<f64> = c.iter().map(|ci| 4.0 * n as f64 * ci - 4.0 * sum).collect();
        let wx: Vec<f64> = w.iter().zip(x).map(|(a, b)| a * b).collect();
        self.est.cov.mul_vec_into(&wx, g);
        for k in 0..n {
            g[k] = (g[k] + w[k] * sx[k]) / self.scale;
        }
    }
}

/// Spread of risk contributions relative to portfolio variance.
pub fn contribution_spread(x: &[f64], est: &MarketEstimates) -> Result<f64> {
    let c = risk_contributions(x, est)?;
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let var: f64 = c.iter().sum();
    Ok((hi - lo) / var.max(1e-12))
}

/// Equal risk contribution portfolio by multi-start projected local search.
pub fn solve_erc(est: &MarketEstimates, starts: &MultiStart) -> Result<SolveReport> {
    let n = est.n;
    let scale = est.cov.quad_form(&equal_weights(n));
    if !(scale > 0.0) {
        return Err(Error::DegenerateRisk);
    }
    let f = RiskParity { est, scale };
    let set = BoxHyperplane::simplex(n);
    let opts = SpgOptions { max_iter: QP_MAX_ITER, tol: 1e-14 };
    let mut reports = Vec::new();
    for s in starts.points(n) {
        let res = minimize(&f, &set, &s, &opts);
        let objective = erc_objective(&res.x, est)?;
        reports.push(SolveReport { objective, x: WeightVector::new(res.x), status: SolveStatus::Optimal, iterations: res.iterations });
    }
    let mut best = best_report(reports, true);
    best.status = if contribution_spread(&best.x.x, est)? <= 1e-6 {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use approx::assert_abs_diff_eq;

    fn two_asset(s1: f64, s2: f64, rho: f64) -> MarketEstimates {
        let corr = Matrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
        MarketEstimates::from_correlation(vec![0.0, 0.0], &[s1, s2], &corr).unwrap()
    }

    #[test]
    fn equal_weights_examples() {
        assert_eq!(solve_ew(1).unwrap().x, vec![1.0]);
        assert_eq!(solve_ew(4).unwrap().x, vec![0.25; 4]);
        assert!(matches!(solve_ew(0), Err(Error::BadDimension(_))));
    }

    #[test]
    fn gmv_two_asset_analytic() {
        let est = MarketEstimates::from_moments(vec![0.0; 2], Matrix::diagonal(&[0.01, 0.04])).unwrap();
        let rep = solve_gmv(&est, &MultiStart::single()).unwrap();
        assert!(rep.is_optimal());
        assert_abs_diff_eq!(rep.x.x[0], 0.8, epsilon = 1e-3);
        assert_abs_diff_eq!(rep.x.x[1], 0.2, epsilon = 1e-3);
        let iso = MarketEstimates::from_moments(vec![0.0; 5], Matrix::identity(5)).unwrap();
        let rep = solve_gmv(&iso, &MultiStart::default()).unwrap();
        for v in &rep.x.x {
            assert_abs_diff_eq!(*v, 0.2, epsilon = 1e-6);
        }
    }

    #[test]
    fn mdp_examples() {
        let est = two_asset(0.1, 0.1, 0.0);
        let rep = solve_mdp_dr(&est, &MultiStart::default()).unwrap();
        assert_abs_diff_eq!(rep.x.x[0], 0.5, epsilon = 1e-3);
        // Uncorrelated: weights proportional to inverse volatility.
        let s = [0.1, 0.2, 0.4];
        let est = MarketEstimates::from_moments(vec![0.0; 3], Matrix::diagonal(&s.map(|v| v * v))).unwrap();
        let rep = solve_mdp_dr(&est, &MultiStart::default()).unwrap();
        let inv: f64 = s.iter().map(|v| 1.0 / v).sum();
        for i in 0..3 {
            assert_abs_diff_eq!(rep.x.x[i], (1.0 / s[i]) / inv, epsilon = 1e-3);
        }
        let rw = solve_mdp_rw(&est).unwrap();
        assert_abs_diff_eq!(dot(&s, &rw.risk_weighted), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rw.report.x.sum(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rw.report.objective, rep.objective, epsilon = 1e-4);
        let perfect = two_asset(0.1, 0.3, 1.0);
        let rep = solve_mdp_dr(&perfect, &MultiStart::default()).unwrap();
        assert_abs_diff_eq!(rep.objective, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_risk_rejected() {
        let est = MarketEstimates::from_moments(vec![0.0; 2], Matrix::zeros(2, 2)).unwrap();
        assert_eq!(solve_mdp_dr(&est, &MultiStart::single()), Err(Error::DegenerateRisk));
        assert_eq!(solve_mdp_rw(&est), Err(Error::DegenerateRisk));
    }

    #[test]
    fn erc_examples() {
        let iso = MarketEstimates::from_moments(vec![0.0; 4], Matrix::identity(4)).unwrap();
        let rep = solve_erc(&iso, &MultiStart::default()).unwrap();
        assert!(rep.is_optimal());
        for v in &rep.x.x {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(rep.objective, 0.0, epsilon = 1e-20);
        for rho in [-0.5, 0.0, 0.5] {
            let est = two_asset(0.1, 0.25, rho);
            let rep = solve_erc(&est, &MultiStart::default()).unwrap();
            assert!(rep.is_optimal(), "rho {rho}: {rep:?}");
            assert_abs_diff_eq!(rep.x.x[0], 0.25 / 0.35, epsilon = 1e-3);
            assert!(rep.objective <= erc_objective(&equal_weights(2), &est).unwrap());
        }
    }
}
