//! Deterministic solver agents: projected-gradient QP and NLP over the
//! long-only simplex, dense simplex LP, and the allocations built on them.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formulations::{equal_weights, WeightVector};

pub mod lp;
pub mod markowitz;
pub mod projection;
pub mod qp;
pub mod riskbased;
pub mod robust;
pub mod spg;

pub use lp::{solve_lp, LpProblem, LpSolution};
pub use markowitz::{markowitz_sweep, solve_markowitz};
pub use projection::{project_simplex_box, BoxHyperplane};
pub use qp::{solve_qp, QpProblem};
pub use riskbased::{solve_erc, solve_ew, solve_gmv, solve_mdp_dr, solve_mdp_rw, MdpRwSolution};
pub use robust::{robust_sweep, solve_robust, RobustSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    IterationLimit,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: WeightVector,
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

impl SolveReport {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Start points for multi-start local search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiStart {
    pub count: usize,
    pub seed: u64,
}

impl MultiStart {
    pub const DEFAULT_COUNT: usize = 16;

    pub fn single() -> Self {
        Self { count: 1, seed: 0 }
    }

    pub fn new(count: usize, seed: u64) -> Self {
        Self { count: count.max(1), seed }
    }

    /// Equal weights first, then up to half the budget on simplex vertices,
    /// the rest drawn uniformly from the simplex.
    pub fn points(&self, n: usize) -> Vec<Vec<f64>> {
        let count = self.count.max(1);
        let mut out = Vec::with_capacity(count);
        out.push(equal_weights(n));
        let vertices = ((count - 1) / 2).min(n);
        for i in 0..vertices {
            let mut e = alloc::vec![0.0; n];
            e[i] = 1.0;
            out.push(e);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        while out.len() < count {
            out.push(uniform_simplex(&mut rng, n));
        }
        out
    }
}

impl Default for MultiStart {
    fn default() -> Self {
        Self { count: Self::DEFAULT_COUNT, seed: 0 }
    }
}

/// Uniform draw from the probability simplex (normalized exponentials).
pub fn uniform_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -libm::log(1.0 - rng.random::<f64>())).collect();
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        v = equal_weights(n);
    }
    v
}
