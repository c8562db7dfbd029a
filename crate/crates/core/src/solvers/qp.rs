use alloc::format;
use alloc::vec::Vec;

use super::projection::BoxHyperplane;
use super::spg::{minimize, Objective, SpgOptions};
use super::{SolveReport, SolveStatus};
use crate::error::{check_dim, Error, Result};
use crate::formulations::WeightVector;
use crate::linalg::{dot, Matrix};

/// Minimize `x'Qx + c'x` subject to at most one equality row and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct QpProblem {
    pub q: Matrix,
    pub c: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub bounds: Vec<(f64, f64)>,
}

impl QpProblem {
    /// `min x'Qx` over the long-only simplex.
    pub fn simplex(q: Matrix) -> Self {
        let n = q.rows();
        Self { q, c: alloc::vec![0.0; n], eq: alloc::vec![(alloc::vec![1.0; n], 1.0)], bounds: alloc::vec![(0.0, 1.0); n] }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.q.quad_form(x) + dot(&self.c, x)
    }

    pub(crate) fn feasible_set(&self) -> Result<BoxHyperplane> {
        let n = self.dim();
        check_dim(n, self.q.rows())?;
        check_dim(n, self.q.cols())?;
        check_dim(n, self.bounds.len())?;
        if !self.q.is_symmetric(1e-12) {
            return Err(Error::BadConfig("QP matrix is not symmetric".into()));
        }
        if let Some(i) = self.bounds.iter().position(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::BadConfig(format!("bounds of variable {i} are inverted")));
        }
        if self.eq.len() > 1 {
            return Err(Error::Unsupported(format!("{} equality rows; at most one is supported", self.eq.len())));
        }
        let (normal, rhs) = match self.eq.first() {
            Some((a, b)) => {
                check_dim(n, a.len())?;
                (Some(a.clone()), *b)
            }
            None => (None, 0.0),
        };
        Ok(BoxHyperplane {
            lo: self.bounds.iter().map(|b| b.0).collect(),
            hi: self.bounds.iter().map(|b| b.1).collect(),
            normal,
            rhs,
        })
    }

    pub(crate) fn max_residual(&self, x: &[f64]) -> f64 {
        let eq = self.eq.iter().map(|(a, b)| (dot(a, x) - b).abs()).fold(0.0, f64::max);
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|((lo, hi), v)| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        eq.max(bounds)
    }
}

impl Objective for QpProblem {
    fn value(&self, x: &[f64]) -> f64 {
        self.objective(x)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        self.q.mul_vec_into(x, g);
        for (gi, ci) in g.iter_mut().zip(&self.c) {
            *gi = 2.0 * *gi + ci;
        }
    }
}

/// Projected-gradient solve from `start`. On hitting `max_iter` the best iterate is
/// returned with [`SolveStatus::IterationLimit`].
pub fn solve_qp(p: &QpProblem, start: &[f64], max_iter: usize, tol: f64) -> Result<SolveReport> {
    let set = p.feasible_set()?;
    check_dim(p.dim(), start.len())?;
    let res = minimize(p, &set, start, &SpgOptions { max_iter, tol });
    let status = if res.converged && p.max_residual(&res.x) <= 1e-6 {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    Ok(SolveReport { objective: p.objective(&res.x), x: WeightVector::new(res.x), status, iterations: res.iterations })
}
