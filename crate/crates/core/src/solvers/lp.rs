//! Dense two-phase primal simplex. Pivots follow Dantzig's rule and fall back to
//! Bland's rule right after a degenerate pivot, which rules out cycling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

/// Maximize `c'v` subject to `a_ub v <= b_ub`, `a_eq v = b_eq`, `lo <= v <= hi`.
/// Lower bounds must be finite; `hi` may be `+inf`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    /// `rows x (cols + 1)`; last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i != row {
                let factor = r[col];
                if factor != 0.0 {
                    for (v, pv) in r.iter_mut().zip(&pivot_row) {
                        *v -= factor * pv;
                    }
                    r[col] = 0.0;
                }
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: &[bool]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..self.cols {
                    d[j] -= cb * self.t[i][j];
                }
            }
        }
        for j in 0..self.cols {
            if !allowed[j] {
                d[j] = 0.0;
            }
        }
        d
    }

    /// Maximizes `cost'u` over the current basis. Returns `Err(Unbounded)` when a
    /// ray is found.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        let mut bland = false;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::Unsupported(format!("simplex exceeded {MAX_PIVOTS} pivots")));
            }
            let d = self.reduced_costs(cost, allowed);
            let entering = if bland {
                (0..self.cols).find(|&j| d[j] > EPS)
            } else {
                (0..self.cols).filter(|&j| d[j] > EPS).fold(None, |best: Option<usize>, j| match best {
                    Some(b) if d[b] >= d[j] => Some(b),
                    _ => Some(j),
                })
            };
            let Some(col) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else { return Err(Error::Unbounded) };
            bland = ratio.abs() <= EPS;
            self.pivot(row, col);
        }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let nv = p.c.len();
    check_dim(nv, p.bounds.len())?;
    check_dim(p.a_ub.len(), p.b_ub.len())?;
    check_dim(p.a_eq.len(), p.b_eq.len())?;
    for row in p.a_ub.iter().chain(&p.a_eq) {
        check_dim(nv, row.len())?;
    }
    for (j, &(lo, hi)) in p.bounds.iter().enumerate() {
        if !lo.is_finite() {
            return Err(Error::Unsupported(format!("variable {j} has an infinite lower bound")));
        }
        if hi < lo {
            return Err(Error::Infeasible);
        }
    }

    // Shift to u = v - lo >= 0; finite upper bounds become inequality rows.
    let lo: Vec<f64> = p.bounds.iter().map(|b| b.0).collect();
    let mut ub_rows: Vec<(Vec<f64>, f64)> =
        p.a_ub.iter().zip(&p.b_ub).map(|(a, &b)| (a.clone(), b - dot(a, &lo))).collect();
    for (j, &(l, h)) in p.bounds.iter().enumerate() {
        if h.is_finite() {
            let mut a = vec![0.0; nv];
            a[j] = 1.0;
            ub_rows.push((a, h - l));
        }
    }
    let eq_rows: Vec<(Vec<f64>, f64)> =
        p.a_eq.iter().zip(&p.b_eq).map(|(a, &b)| (a.clone(), b - dot(a, &lo))).collect();

    let m = ub_rows.len() + eq_rows.len();
    let n_slack = ub_rows.len();
    let n_art = ub_rows.iter().filter(|(_, b)| *b < 0.0).count() + eq_rows.len();
    let cols = nv + n_slack + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut art = nv + n_slack;
    for (i, (a, b)) in ub_rows.iter().enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            t[i][j] = sign * a[j];
        }
        t[i][nv + i] = sign;
        t[i][cols] = sign * b;
        if *b < 0.0 {
            t[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = nv + i;
        }
    }
    for (k, (a, b)) in eq_rows.iter().enumerate() {
        let i = n_slack + k;
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            t[i][j] = sign * a[j];
        }
        t[i][cols] = sign * b;
        t[i][art] = 1.0;
        basis[i] = art;
        art += 1;
    }
    let mut tab = Tableau { t, basis, cols, pivots: 0 };
    let is_art = |j: usize| j >= nv + n_slack;

    if n_art > 0 {
        let cost: Vec<f64> = (0..cols).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        tab.optimize(&cost, &vec![true; cols]).map_err(|e| match e {
            Error::Unbounded => Error::Infeasible,
            other => other,
        })?;
        let infeasibility: f64 =
            tab.basis.iter().enumerate().filter(|(_, &b)| is_art(b)).map(|(i, _)| tab.rhs(i)).sum();
        if infeasibility > 1e-9 {
            return Err(Error::Infeasible);
        }
        // Drive remaining (zero-level) artificials out; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if is_art(tab.basis[i]) {
                match (0..nv + n_slack).find(|&j| tab.t[i][j].abs() > 1e-9) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    let cost: Vec<f64> = (0..cols).map(|j| if j < nv { p.c[j] } else { 0.0 }).collect();
    tab.optimize(&cost, &allowed)?;

    let mut values = lo;
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            values[b] += tab.rhs(i).max(0.0);
        }
    }
    Ok(LpSolution { objective: dot(&p.c, &values), values, iterations: tab.pivots })
}
