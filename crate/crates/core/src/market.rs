//! Return series, sample moments and synthetic market scenarios.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    #[default]
    Arithmetic,
    Log,
}

/// Per-period returns, one row per asset.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnMatrix {
    pub assets: Vec<String>,
    pub kind: ReturnKind,
    pub data: Matrix,
}

impl ReturnMatrix {
    /// Returns from aligned close series. `closes[i]` is the price history of `assets[i]`.
    pub fn from_closes(assets: Vec<String>, closes: &[Vec<f64>], kind: ReturnKind) -> Result<Self> {
        check_dim(assets.len(), closes.len())?;
        let t = closes.first().map_or(0, Vec::len);
        if t < 2 {
            return Err(Error::InsufficientHistory { needed: 2, have: t });
        }
        let mut data = Matrix::zeros(closes.len(), t - 1);
        for (i, series) in closes.iter().enumerate() {
            check_dim(t, series.len())?;
            if let Some((row, &value)) = series.iter().enumerate().find(|(_, &p)| !(p > 0.0)) {
                return Err(Error::NonPositivePrice { asset: i, row, value });
            }
            for (k, w) in series.windows(2).enumerate() {
                data[(i, k)] = match kind {
                    ReturnKind::Arithmetic => (w[1] - w[0]) / w[0],
                    ReturnKind::Log => libm::log(w[1] / w[0]),
                };
            }
        }
        Ok(Self { assets, kind, data })
    }

    pub fn num_assets(&self) -> usize {
        self.data.rows()
    }

    pub fn num_periods(&self) -> usize {
        self.data.cols()
    }
}

/// Sample moments of a return matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketEstimates {
    pub n: usize,
    /// Mean per-period return of each asset.
    pub r: Vec<f64>,
    /// Per-period standard deviation, `sqrt(cov_ii)`.
    pub s: Vec<f64>,
    pub cov: Matrix,
    pub corr: Matrix,
    /// Ridge added to the covariance diagonal to make it positive semidefinite.
    #[serde(default)]
    pub ridge: f64,
}

impl MarketEstimates {
    /// Builds estimates from a mean vector and a covariance matrix, conditioning
    /// the covariance when its smallest eigenvalue is negative.
    pub fn from_moments(r: Vec<f64>, cov: Matrix) -> Result<Self> {
        let n = r.len();
        check_dim(n, cov.rows())?;
        check_dim(n, cov.cols())?;
        let mut cov = cov;
        // Symmetrize exactly so downstream quadratic forms see one matrix.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        let lambda_min = cov.min_symmetric_eigenvalue();
        let ridge = if lambda_min < 0.0 { lambda_min.abs() + 1e-10 } else { 0.0 };
        if ridge > 0.0 {
            cov.add_to_diagonal(ridge);
        }
        let s: Vec<f64> = (0..n).map(|i| libm::sqrt(cov[(i, i)].max(0.0))).collect();
        let mut corr = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let denom = s[i] * s[j];
                    corr[(i, j)] = if denom > 0.0 { (cov[(i, j)] / denom).clamp(-1.0, 1.0) } else { 0.0 };
                }
            }
        }
        Ok(Self { n, r, s, cov, corr, ridge })
    }

    /// Estimates from asset volatilities and a correlation matrix.
    pub fn from_correlation(r: Vec<f64>, s: &[f64], corr: &Matrix) -> Result<Self> {
        let n = r.len();
        check_dim(n, s.len())?;
        check_dim(n, corr.rows())?;
        let mut cov = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] = s[i] * s[j] * corr[(i, j)];
            }
        }
        Self::from_moments(r, cov)
    }

    /// Same estimates with assets reordered so that new asset `i` is old asset `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            n: self.n,
            r: perm.iter().map(|&p| self.r[p]).collect(),
            s: perm.iter().map(|&p| self.s[p]).collect(),
            cov: self.cov.permuted(perm),
            corr: self.corr.permuted(perm),
            ridge: self.ridge,
        }
    }
}

/// Sample mean and unbiased sample covariance of each asset's returns.
pub fn estimate(returns: &ReturnMatrix) -> Result<MarketEstimates> {
    let n = returns.num_assets();
    let t = returns.num_periods();
    if t < 2 {
        return Err(Error::InsufficientHistory { needed: 2, have: t });
    }
    let data = &returns.data;
    let r: Vec<f64> = (0..n).map(|i| data.row(i).iter().sum::<f64>() / t as f64).collect();
    let mut cov = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (data.row(i), data.row(j));
            let c = ri
                .iter()
                .zip(rj)
                .map(|(a, b)| (a - r[i]) * (b - r[j]))
                .sum::<f64>()
                / (t - 1) as f64;
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    MarketEstimates::from_moments(r, cov)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Bearish,
    Bullish,
}

/// Synthetic close prices together with the single-factor model that generated them.
#[derive(Clone, Debug)]
pub struct SynthScenario {
    pub closes: Vec<Vec<f64>>,
    pub drift: Vec<f64>,
    pub volatility: Vec<f64>,
    /// Each asset's share of variance explained by the common factor; the
    /// model correlation of assets `i` and `j` is `sqrt(loading_i * loading_j)`.
    pub loading: Vec<f64>,
}

impl SynthScenario {
    pub fn model_correlation(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            libm::sqrt(self.loading[i] * self.loading[j])
        }
    }
}

/// Generates `periods` daily closes for `n` assets from a one-factor model.
///
/// Bearish markets draw strongly co-moving assets (factor share in
/// `[0.6, 0.9]`) with 90% negative drifts; bullish markets draw moderately
/// co-moving assets (share in `[0.2, 0.6]`) with 90% positive drifts.
pub fn synth_scenario(kind: ScenarioKind, n: usize, periods: usize, seed: u64) -> Result<SynthScenario> {
    if n < 2 {
        return Err(Error::BadDimension(format!("scenario needs at least 2 assets, got {n}")));
    }
    if periods < 30 {
        return Err(Error::BadDimension(format!("scenario needs at least 30 periods, got {periods}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let against = n / 10;
    let (share_lo, share_hi) = match kind {
        ScenarioKind::Bearish => (0.6, 0.9),
        ScenarioKind::Bullish => (0.2, 0.6),
    };
    let sign = match kind {
        ScenarioKind::Bearish => -1.0,
        ScenarioKind::Bullish => 1.0,
    };
    let mut drift = Vec::with_capacity(n);
    let mut volatility = Vec::with_capacity(n);
    let mut loading = Vec::with_capacity(n);
    for i in 0..n {
        // Trailing assets run against the market.
        let magnitude = rng.random_range(0.0015..0.003);
        drift.push(if i < n - against { sign * magnitude } else { -sign * 0.5 * magnitude });
        volatility.push(rng.random_range(0.01..0.02));
        loading.push(rng.random_range(share_lo..share_hi));
    }

    let steps = periods - 1;
    let mut factor: Vec<f64> = (0..steps).map(|_| rng.sample(StandardNormal)).collect();
    // The common factor is centred so market noise does not shift every drift at once.
    let mean = factor.iter().sum::<f64>() / steps as f64;
    factor.iter_mut().for_each(|f| *f -= mean);

    let mut closes = vec![Vec::with_capacity(periods); n];
    for i in 0..n {
        let mut price = rng.random_range(50.0..500.0);
        closes[i].push(price);
        let (a, b) = (libm::sqrt(loading[i]), libm::sqrt(1.0 - loading[i]));
        for f in &factor {
            let eps: f64 = rng.sample(StandardNormal);
            let ret = (drift[i] + volatility[i] * (a * f + b * eps)).max(-0.5);
            price *= 1.0 + ret;
            closes[i].push(price);
        }
    }
    Ok(SynthScenario { closes, drift, volatility, loading })
}
