//! Spectral projected gradient: Barzilai-Borwein steps with a nonmonotone
//! Armijo line search, over any set with a cheap Euclidean projection.

use alloc::vec;
use alloc::vec::Vec;

use super::projection::BoxHyperplane;
use crate::linalg::dot;

pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], g: &mut [f64]);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpgOptions {
    pub max_iter: usize,
    /// Stop when `||P(x - g) - x||_inf` falls below this.
    pub tol: f64,
}

impl Default for SpgOptions {
    fn default() -> Self {
        Self { max_iter: 50_000, tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpgResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub pg_norm: f64,
}

const MEMORY: usize = 10;
const STEP_MIN: f64 = 1e-30;
const STEP_MAX: f64 = 1e30;

fn projected_gradient_norm(set: &BoxHyperplane, x: &[f64], g: &[f64], buf: &mut [f64]) -> f64 {
    for i in 0..x.len() {
        buf[i] = x[i] - g[i];
    }
    set.project(buf);
    buf.iter().zip(x).map(|(p, xi)| (p - xi).abs()).fold(0.0, f64::max)
}

pub fn minimize<F: Objective + ?Sized>(f: &F, set: &BoxHyperplane, start: &[f64], opts: &SpgOptions) -> SpgResult {
    let n = start.len();
    let mut x = start.to_vec();
    set.project(&mut x);
    let mut fx = f.value(&x);
    let mut g = vec![0.0; n];
    f.gradient(&x, &mut g);
    let mut buf = vec![0.0; n];
    let mut pg = projected_gradient_norm(set, &x, &g, &mut buf);
    let mut step = if pg > 0.0 { (1.0 / pg).clamp(STEP_MIN, STEP_MAX) } else { 1.0 };
    let mut history: Vec<f64> = vec![fx];

    let mut d = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if !(pg > opts.tol) {
            break;
        }
        iterations += 1;
        for i in 0..n {
            d[i] = x[i] - step * g[i];
        }
        set.project(&mut d);
        for i in 0..n {
            d[i] -= x[i];
        }
        let gd = dot(&g, &d);
        let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut lambda = 1.0;
        let mut f_trial;
        loop {
            for i in 0..n {
                trial[i] = x[i] + lambda * d[i];
            }
            f_trial = f.value(&trial);
            if f_trial <= reference + 1e-4 * lambda * gd || lambda < 1e-20 {
                break;
            }
            // Safeguarded quadratic interpolation.
            let denom = 2.0 * (f_trial - fx - lambda * gd);
            let next = if denom > 0.0 { -gd * lambda * lambda / denom } else { 0.5 * lambda };
            lambda = next.clamp(0.1 * lambda, 0.5 * lambda);
        }
        if !(f_trial <= reference) || lambda < 1e-20 {
            // No usable decrease left at this precision.
            break;
        }
        f.gradient(&trial, &mut g_new);
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..n {
            let s = trial[i] - x[i];
            let y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX.min(step * 10.0) };
        core::mem::swap(&mut x, &mut trial);
        core::mem::swap(&mut g, &mut g_new);
        fx = f_trial;
        if history.len() == MEMORY {
            history.remove(0);
        }
        history.push(fx);
        pg = projected_gradient_norm(set, &x, &g, &mut buf);
        if ss == 0.0 {
            break;
        }
    }
    SpgResult { x, value: fx, iterations, converged: !(pg > opts.tol), pg_norm: pg }
}
