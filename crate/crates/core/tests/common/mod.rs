//! Brute-force reference solvers, independent of the library's solver code.
#![allow(dead_code, clippy::needless_range_loop)]

use cga_core::{MarketEstimates, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random positive definite covariance `A A' + eps I` with entries of daily-return scale.
pub fn random_covariance(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix {
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0) * scale).collect()).collect();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (0..n).map(|k| a[i][k] * a[j][k]).sum::<f64>();
        }
        m[(i, i)] += 0.05 * scale * scale;
    }
    m
}

pub fn random_estimates(rng: &mut ChaCha8Rng, n: usize) -> MarketEstimates {
    let cov = random_covariance(rng, n, 0.02);
    let r = (0..n).map(|_| rng.random_range(-0.002..0.003)).collect();
    MarketEstimates::from_moments(r, cov).unwrap()
}

/// Estimates with a prescribed correlation and volatilities.
pub fn two_asset(s1: f64, s2: f64, rho: f64) -> MarketEstimates {
    let corr = Matrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
    MarketEstimates::from_correlation(vec![0.0, 0.0], &[s1, s2], &corr).unwrap()
}

/// Every point of the simplex whose coordinates are multiples of `1/steps`.
pub fn simplex_grid(n: usize, steps: usize, mut visit: impl FnMut(&[f64])) {
    fn rec(prefix: &mut Vec<usize>, n: usize, left: usize, steps: usize, visit: &mut dyn FnMut(&[f64])) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            let x: Vec<f64> = prefix.iter().map(|&k| k as f64 / steps as f64).collect();
            visit(&x);
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(prefix, n, left - k, steps, visit);
            prefix.pop();
        }
    }
    rec(&mut Vec::new(), n, steps, steps, &mut visit);
}

pub fn grid_min(n: usize, steps: usize, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, vec![]);
    simplex_grid(n, steps, |x| {
        let v = f(x);
        if v < best.0 {
            best = (v, x.to_vec());
        }
    });
    best
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Maximizes `c'x` over `{x : G x <= h}` by enumerating every basic solution.
/// Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(c: &[f64], g: &[Vec<f64>], h: &[f64]) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let m = g.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| g[i].clone()).collect();
        let b = idx.iter().map(|&i| h[i]).collect();
        if let Some(x) = gauss_solve(a, b) {
            let feasible = (0..m).all(|i| g[i].iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= h[i] + 1e-9);
            if feasible {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, x));
                }
            }
        }
        // Next combination of n rows out of m.
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if idx[k] < m - n + k {
                break;
            }
        }
        idx[k] += 1;
        for j in k + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `{x : G x <= h}` form of an [`LpProblem`]: equalities become two rows and
/// bounds become single-variable rows.
pub fn lp_as_inequalities(p: &cga_core::solvers::LpProblem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = p.c.len();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for (a, b) in p.a_ub.iter().zip(&p.b_ub) {
        g.push(a.clone());
        h.push(*b);
    }
    for (a, b) in p.a_eq.iter().zip(&p.b_eq) {
        g.push(a.clone());
        h.push(*b);
        g.push(a.iter().map(|v| -v).collect());
        h.push(-b);
    }
    for (j, &(lo, hi)) in p.bounds.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        g.push(e);
        h.push(-lo);
        if hi.is_finite() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            g.push(e);
            h.push(hi);
        }
    }
    (g, h)
}

/// Central finite-difference gradient.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

/// Double-sum variance from volatilities and correlations.
pub fn variance_double_sum(x: &[f64], est: &MarketEstimates) -> f64 {
    let n = x.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            v += x[i] * x[j] * est.s[i] * est.s[j] * est.corr[(i, j)];
        }
    }
    v
}
