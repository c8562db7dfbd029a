//! Robust return maximization with a budget of uncertainty on the asset risks.

use alloc::vec;
use alloc::vec::Vec;

use super::lp::{solve_lp, LpProblem};
use super::{SolveReport, SolveStatus};
use crate::error::{Error, Result};
use crate::formulations::{RobustParams, WeightVector};
use crate::market::MarketEstimates;

#[derive(Clone, Debug, PartialEq)]
pub struct RobustSolution {
    pub report: SolveReport,
    pub params: RobustParams,
}

/// The LP over `(x, p, q)`:
/// `max r'x - gamma p - sum q` s.t. `sum x = 1`, `p + q_i >= s_i x_i`, `0 <= x <= 1`, `p, q >= 0`.
pub fn robust_lp(est: &MarketEstimates, gamma: f64) -> LpProblem {
    let n = est.n;
    let nv = 2 * n + 1;
    let mut c = vec![0.0; nv];
    c[..n].copy_from_slice(&est.r);
    c[n] = -gamma;
    c[n + 1..].iter_mut().for_each(|v| *v = -1.0);
    let a_ub = (0..n)
        .map(|i| {
            let mut row = vec![0.0; nv];
            row[i] = est.s[i];
            row[n] = -1.0;
            row[n + 1 + i] = -1.0;
            row
        })
        .collect();
    let mut budget = vec![0.0; nv];
    budget[..n].iter_mut().for_each(|v| *v = 1.0);
    let mut bounds = vec![(0.0, 1.0); n];
    bounds.extend(core::iter::repeat_n((0.0, f64::INFINITY), n + 1));
    LpProblem { c, a_ub, b_ub: vec![0.0; n], a_eq: vec![budget], b_eq: vec![1.0], bounds }
}

pub fn solve_robust(est: &MarketEstimates, gamma: f64) -> Result<RobustSolution> {
    let n = est.n;
    if !(0.0..=n as f64).contains(&gamma) {
        return Err(Error::BadConfig(alloc::format!("budget of uncertainty {gamma} outside [0, {n}]")));
    }
    let sol = solve_lp(&robust_lp(est, gamma))?;
    let x = sol.values[..n].to_vec();
    let params = RobustParams { gamma, p: sol.values[n], q: sol.values[n + 1..].to_vec() };
    Ok(RobustSolution {
        report: SolveReport {
            x: WeightVector::new(x),
            objective: sol.objective,
            status: SolveStatus::Optimal,
            iterations: sol.iterations,
        },
        params,
    })
}

/// Budgets `0, increment, 2 increment, ...` up to the asset count.
pub fn gamma_grid(n: usize, increment: f64) -> Result<Vec<f64>> {
    if !(increment > 0.0) || !increment.is_finite() {
        return Err(Error::BadConfig(alloc::format!("gamma increment must be positive, got {increment}")));
    }
    let steps = libm::floor(n as f64 / increment + 1e-9) as usize;
    Ok((0..=steps).map(|k| (k as f64 * increment).min(n as f64)).collect())
}

pub fn robust_sweep(est: &MarketEstimates, increment: f64) -> Result<Vec<RobustSolution>> {
    gamma_grid(est.n, increment)?.into_iter().map(|g| solve_robust(est, g)).collect()
}
