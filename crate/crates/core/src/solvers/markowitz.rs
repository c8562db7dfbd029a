//! Mean-variance agents: minimum variance subject to a lower bound on return.
//!
//! The return bound is handled through its multiplier: for `lambda >= 0` the
//! simplex QP `min x'Σx - lambda r'x` gives a point on the efficient frontier whose
//! return grows with `lambda`, so the target is met by bisection on `lambda`.

use alloc::vec;
use alloc::vec::Vec;

use super::qp::{solve_qp, QpProblem};
use super::{MultiStart, SolveReport, SolveStatus};
use crate::error::{Error, Result};
use crate::formulations::WeightVector;
use crate::linalg::{argmax, dot};
use crate::market::MarketEstimates;

const MAX_ITER: usize = 50_000;
const TOL: f64 = 1e-13;
const BISECTIONS: usize = 200;

struct Frontier<'a> {
    est: &'a MarketEstimates,
    qp: QpProblem,
}

impl<'a> Frontier<'a> {
    fn new(est: &'a MarketEstimates) -> Self {
        Self { est, qp: QpProblem::simplex(est.cov.clone()) }
    }

    fn solve(&mut self, lambda: f64, start: &[f64]) -> Result<SolveReport> {
        for (c, r) in self.qp.c.iter_mut().zip(&self.est.r) {
            *c = -lambda * r;
        }
        solve_qp(&self.qp, start, MAX_ITER, TOL)
    }

    fn ret(&self, x: &[f64]) -> f64 {
        dot(&self.est.r, x)
    }
}

/// Minimizes `x'Σx` over the long-only simplex subject to `r'x >= rp`.
/// Targets above the best single-asset return cannot be met; the report then
/// carries that asset alone with [`SolveStatus::IterationLimit`].
pub fn solve_markowitz(est: &MarketEstimates, rp: f64, starts: &MultiStart) -> Result<SolveReport> {
    if !rp.is_finite() {
        return Err(Error::BadConfig(alloc::format!("return target {rp} is not finite")));
    }
    let n = est.n;
    let top = argmax(&est.r);
    if rp > est.r[top] {
        let mut x = vec![0.0; n];
        x[top] = 1.0;
        return Ok(SolveReport {
            objective: est.cov.quad_form(&x),
            x: WeightVector::new(x),
            status: SolveStatus::IterationLimit,
            iterations: 0,
        });
    }
    let mut f = Frontier::new(est);
    let points = starts.points(n);
    let mut iterations = 0;
    let mut solve = |f: &mut Frontier<'_>, lambda: f64, start: &[f64]| -> Result<SolveReport> {
        let rep = f.solve(lambda, start)?;
        iterations += rep.iterations;
        Ok(rep)
    };

    let mut lambda = 0.0;
    if rp >= est.r[top] {
        // Only the assets sharing the top return can reach it.
        for (b, r) in f.qp.bounds.iter_mut().zip(&est.r) {
            if *r < rp {
                b.1 = 0.0;
            }
        }
    } else {
        let mut hi = solve(&mut f, 0.0, &points[0])?;
        if f.ret(&hi.x.x) < rp {
            let spread = est.r[top] - est.r.iter().copied().fold(f64::INFINITY, f64::min);
            let mut lo_lambda = 0.0;
            let mut hi_lambda = est.cov.as_slice().iter().step_by(n + 1).sum::<f64>() / (n as f64 * spread);
            loop {
                hi = solve(&mut f, hi_lambda, &hi.x.x.clone())?;
                if f.ret(&hi.x.x) >= rp || !hi_lambda.is_finite() {
                    break;
                }
                lo_lambda = hi_lambda;
                hi_lambda *= 4.0;
            }
            for _ in 0..BISECTIONS {
                if hi_lambda - lo_lambda <= 1e-13 * hi_lambda || f.ret(&hi.x.x) - rp <= 1e-13 * spread {
                    break;
                }
                let mid = 0.5 * (lo_lambda + hi_lambda);
                let rep = solve(&mut f, mid, &hi.x.x.clone())?;
                if f.ret(&rep.x.x) >= rp {
                    hi_lambda = mid;
                    hi = rep;
                } else {
                    lo_lambda = mid;
                }
            }
            lambda = hi_lambda;
        }
    }

    let mut best: Option<SolveReport> = None;
    for start in &points {
        let rep = solve(&mut f, lambda, start)?;
        if best.as_ref().is_none_or(|b| rep.objective < b.objective) {
            best = Some(rep);
        }
    }
    let best = best.expect("at least one start");
    let x = best.x.x;
    let shortfall = (rp - f.ret(&x)).max(0.0);
    let status = if best.status == SolveStatus::Optimal && shortfall <= 1e-6 {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    Ok(SolveReport { objective: est.cov.quad_form(&x), x: WeightVector::new(x), status, iterations })
}

/// Solves at `num_points` return targets equally spaced from the lowest to the
/// highest asset return.
pub fn markowitz_sweep(est: &MarketEstimates, num_points: usize, starts: &MultiStart) -> Result<Vec<SolveReport>> {
    sweep_targets(est, num_points)?.into_iter().map(|rp| solve_markowitz(est, rp, starts)).collect()
}

pub fn sweep_targets(est: &MarketEstimates, num_points: usize) -> Result<Vec<f64>> {
    if num_points < 2 {
        return Err(Error::BadConfig(alloc::format!("a sweep needs at least 2 points, got {num_points}")));
    }
    let lo = est.r.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = est.r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = (hi - lo) / (num_points - 1) as f64;
    Ok((0..num_points).map(|k| if k + 1 == num_points { hi } else { lo + k as f64 * step }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::solvers::riskbased::solve_gmv;
    use approx::assert_abs_diff_eq;

    fn three_assets() -> MarketEstimates {
        let cov = Matrix::from_rows(&[
            vec![0.04, 0.006, 0.002],
            vec![0.006, 0.09, 0.01],
            vec![0.002, 0.01, 0.16],
        ])
        .unwrap();
        MarketEstimates::from_moments(vec![0.05, 0.08, 0.12], cov).unwrap()
    }

    #[test]
    fn low_target_reproduces_gmv() {
        let est = three_assets();
        let gmv = solve_gmv(&est, &MultiStart::single()).unwrap();
        let gmv_return = dot(&est.r, &gmv.x.x);
        assert!(gmv_return >= 0.05);
        let rep = solve_markowitz(&est, 0.05, &MultiStart::single()).unwrap();
        assert!(rep.is_optimal());
        for i in 0..3 {
            assert_abs_diff_eq!(rep.x.x[i], gmv.x.x[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn top_target_concentrates_on_best_asset() {
        let est = three_assets();
        let rep = solve_markowitz(&est, 0.12, &MultiStart::default()).unwrap();
        assert_abs_diff_eq!(rep.x.x[2], 1.0, epsilon = 1e-3);
        let over = solve_markowitz(&est, 0.2, &MultiStart::single()).unwrap();
        assert_eq!(over.status, SolveStatus::IterationLimit);
        assert_eq!(over.x.x, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn sweep_endpoints_and_monotone_frontier() {
        let est = three_assets();
        assert_eq!(sweep_targets(&est, 2).unwrap(), vec![0.05, 0.12]);
        let reports = markowitz_sweep(&est, 15, &MultiStart::single()).unwrap();
        assert_eq!(reports.len(), 15);
        for w in reports.windows(2) {
            assert!(w[1].objective >= w[0].objective - 1e-8);
            assert!(dot(&est.r, &w[1].x.x) >= dot(&est.r, &w[0].x.x) - 1e-8);
        }
        assert!(sweep_targets(&est, 1).is_err());
    }
}
