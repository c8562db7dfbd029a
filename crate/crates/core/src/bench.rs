//! Standard global-optimization test functions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchKind {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
}

impl BenchKind {
    pub const ALL: [BenchKind; 4] = [BenchKind::Sphere, BenchKind::Rosenbrock, BenchKind::Rastrigin, BenchKind::Ackley];

    pub fn name(self) -> &'static str {
        match self {
            BenchKind::Sphere => "sphere",
            BenchKind::Rosenbrock => "rosenbrock",
            BenchKind::Rastrigin => "rastrigin",
            BenchKind::Ackley => "ackley",
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            BenchKind::Sphere => (-5.0, 5.0),
            BenchKind::Rosenbrock => (-5.0, 10.0),
            BenchKind::Rastrigin => (-5.12, 5.12),
            BenchKind::Ackley => (-32.768, 32.768),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchFunction {
    pub kind: BenchKind,
    pub dim: usize,
    pub bounds: Vec<(f64, f64)>,
}

impl BenchFunction {
    pub fn new(kind: BenchKind, dim: usize) -> Self {
        Self { kind, dim, bounds: vec![kind.domain(); dim] }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn global_minimum(&self) -> (Vec<f64>, f64) {
        let at = match self.kind {
            BenchKind::Rosenbrock => 1.0,
            _ => 0.0,
        };
        (vec![at; self.dim], 0.0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        if let Some(index) = x.iter().zip(&self.bounds).position(|(v, (lo, hi))| !(lo..=hi).contains(&v)) {
            return Err(Error::OutOfBounds { index });
        }
        Ok(self.value(x))
    }

    /// Evaluation without the domain checks.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            BenchKind::Sphere => x.iter().map(|v| v * v).sum(),
            BenchKind::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = 1.0 - w[0];
                    100.0 * a * a + b * b
                })
                .sum(),
            BenchKind::Rastrigin => {
                10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * libm::cos(2.0 * PI * v)).sum::<f64>()
            }
            BenchKind::Ackley => {
                let d = x.len() as f64;
                let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = x.iter().map(|v| libm::cos(2.0 * PI * v)).sum::<f64>() / d;
                -20.0 * libm::exp(-0.2 * libm::sqrt(sq)) - libm::exp(cs) + 20.0 + E
            }
        }
    }

    /// Maps a point of the unit cube onto the function's domain.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.bounds).map(|(t, (lo, hi))| lo + t * (hi - lo)).collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.bounds).map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
    }
}

/// Every function in dimensions 2, 5 and 10.
pub fn suite() -> Vec<BenchFunction> {
    BenchKind::ALL
        .iter()
        .flat_map(|&k| [2, 5, 10].into_iter().map(move |d| BenchFunction::new(k, d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        assert_eq!(BenchFunction::new(BenchKind::Sphere, 3).evaluate(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(BenchFunction::new(BenchKind::Rosenbrock, 2).evaluate(&[1.0, 1.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            BenchFunction::new(BenchKind::Rastrigin, 2).evaluate(&[0.5, 0.5]).unwrap(),
            40.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn minima_match_declared_values() {
        for f in suite() {
            let (x, v) = f.global_minimum();
            assert_abs_diff_eq!(f.evaluate(&x).unwrap(), v, epsilon = 1e-12);
        }
        assert_eq!(suite().len(), 12);
    }

    #[test]
    fn domain_checks() {
        let f = BenchFunction::new(BenchKind::Sphere, 2);
        assert_eq!(f.evaluate(&[6.0, 0.0]), Err(Error::OutOfBounds { index: 0 }));
        assert!(matches!(f.evaluate(&[0.0]), Err(Error::DimensionMismatch { .. })));
        let u = f.to_unit(&[1.0, -2.0]);
        let back = f.from_unit(&u);
        assert_abs_diff_eq!(back[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(back[1], -2.0, epsilon = 1e-12);
    }
}
