//! Objective functions and constraint checks evaluated on a weight vector.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::market::MarketEstimates;

pub const BUDGET_TOL: f64 = 1e-8;
pub const INEQ_TOL: f64 = 1e-9;

/// Candidate portfolio weights with optional provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_id: Option<String>,
}

impl WeightVector {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, agent_id: None }
    }

    pub fn with_agent(x: Vec<f64>, agent_id: impl Into<String>) -> Self {
        Self { x, agent_id: Some(agent_id.into()) }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn sum(&self) -> f64 {
        self.x.iter().sum()
    }

    pub fn is_long_only(&self) -> bool {
        self.x.iter().all(|&v| (-INEQ_TOL..=1.0 + INEQ_TOL).contains(&v))
    }

    pub fn is_budget_feasible(&self) -> bool {
        (self.sum() - 1.0).abs() <= BUDGET_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Every asset's return `r_i x_i` is held against the target.
    #[default]
    PerAsset,
    /// Only the portfolio return `r'x` is held against the target.
    Portfolio,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub alpha: f64,
    pub beta: f64,
    pub rp: f64,
}

impl PenaltyParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha >= 0.0 && self.beta >= 0.0 && self.rp.is_finite() {
            Ok(())
        } else {
            Err(Error::BadConfig(alloc::format!("penalty multipliers must be non-negative: {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustParams {
    pub gamma: f64,
    pub p: f64,
    pub q: Vec<f64>,
}

pub fn portfolio_variance(x: &[f64], est: &MarketEstimates) -> Result<f64> {
    check_dim(est.n, x.len())?;
    Ok(est.cov.quad_form(x).max(0.0))
}

pub fn portfolio_return(x: &[f64], est: &MarketEstimates) -> Result<f64> {
    check_dim(est.n, x.len())?;
    Ok(dot(&est.r, x))
}

/// Variance plus squared penalties for return shortfall and budget violation.
pub fn penalty_objective(x: &[f64], est: &MarketEstimates, pp: &PenaltyParams, mode: PenaltyMode) -> Result<f64> {
    let variance = portfolio_variance(x, est)?;
    let shortfall = match mode {
        PenaltyMode::PerAsset => est
            .r
            .iter()
            .zip(x)
            .map(|(r, xi)| {
                let gap = (pp.rp - r * xi).max(0.0);
                gap * gap
            })
            .sum::<f64>(),
        PenaltyMode::Portfolio => {
            let gap = (pp.rp - dot(&est.r, x)).max(0.0);
            gap * gap
        }
    };
    let budget = x.iter().sum::<f64>() - 1.0;
    Ok(variance + pp.alpha * shortfall + pp.beta * budget * budget)
}

/// Gradient of [`penalty_objective`].
pub fn penalty_gradient(x: &[f64], est: &MarketEstimates, pp: &PenaltyParams, mode: PenaltyMode) -> Result<Vec<f64>> {
    check_dim(est.n, x.len())?;
    let mut g = est.cov.mul_vec(x);
    let budget = x.iter().sum::<f64>() - 1.0;
    let portfolio_gap = (pp.rp - dot(&est.r, x)).max(0.0);
    for (k, gk) in g.iter_mut().enumerate() {
        let r = est.r[k];
        let gap = match mode {
            PenaltyMode::PerAsset => (pp.rp - r * x[k]).max(0.0),
            PenaltyMode::Portfolio => portfolio_gap,
        };
        *gk = 2.0 * *gk - 2.0 * pp.alpha * gap * r + 2.0 * pp.beta * budget;
    }
    Ok(g)
}

/// Nominal return minus the protection cost `gamma * p + sum(q)`.
pub fn robust_objective(x: &[f64], rp: &RobustParams, est: &MarketEstimates) -> Result<f64> {
    check_dim(est.n, x.len())?;
    check_dim(est.n, rp.q.len())?;
    Ok(dot(&est.r, x) - rp.gamma * rp.p - rp.q.iter().sum::<f64>())
}

pub fn robust_feasible(x: &[f64], rp: &RobustParams, est: &MarketEstimates) -> Result<bool> {
    check_dim(est.n, x.len())?;
    check_dim(est.n, rp.q.len())?;
    let w = WeightVector::new(x.to_vec());
    let covered = (0..est.n).all(|i| rp.p + rp.q[i] >= est.s[i] * x[i] - INEQ_TOL);
    Ok(covered
        && rp.p >= -INEQ_TOL
        && rp.q.iter().all(|&q| q >= -INEQ_TOL)
        && w.is_long_only()
        && w.is_budget_feasible())
}

/// Weighted average volatility over portfolio volatility.
pub fn diversification_ratio(x: &[f64], est: &MarketEstimates) -> Result<f64> {
    let variance = portfolio_variance(x, est)?;
    if !(variance > 0.0) {
        return Err(Error::ZeroVariancePortfolio);
    }
    Ok(dot(&est.s, x) / libm::sqrt(variance))
}

/// `c_i = x_i (Σx)_i`; the entries sum to the portfolio variance.
pub fn risk_contributions(x: &[f64], est: &MarketEstimates) -> Result<Vec<f64>> {
    check_dim(est.n, x.len())?;
    let sx = est.cov.mul_vec(x);
    Ok(x.iter().zip(&sx).map(|(a, b)| a * b).collect())
}

/// Sum over all ordered pairs of squared risk-contribution differences.
pub fn erc_objective(x: &[f64], est: &MarketEstimates) -> Result<f64> {
    let c = risk_contributions(x, est)?;
    Ok(c.iter().map(|ci| c.iter().map(|cj| (ci - cj) * (ci - cj)).sum::<f64>()).sum())
}

pub fn sharpe(x: &[f64], est: &MarketEstimates, rf: f64) -> Result<f64> {
    let variance = portfolio_variance(x, est)?;
    if !(variance > 0.0) {
        return Err(Error::ZeroVariancePortfolio);
    }
    Ok((dot(&est.r, x) - rf) / libm::sqrt(variance))
}

/// Equal weights `1/n`.
pub fn equal_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}
