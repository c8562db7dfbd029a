//! Ant colony optimization for continuous domains: a sorted archive of
//! solutions acts as a Gaussian-kernel mixture from which new ants are drawn.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bank::DUPLICATE_TOL;
use crate::error::{check_dim, Error, Result};
use crate::linalg::dist_inf;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoConfig {
    pub archive_size: usize,
    /// Kernel locality `q`: small values concentrate sampling on the best entries.
    pub locality: f64,
    /// Width multiplier `xi` of every Gaussian kernel.
    pub evaporation: f64,
    pub ants_per_iter: usize,
    pub max_iters: usize,
    pub seed: u64,
    #[serde(alias = "NUM_SOLUTIONS_ACO")]
    pub num_bank_solutions: usize,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            archive_size: 50,
            locality: 1e-4,
            evaporation: 0.85,
            ants_per_iter: 2,
            max_iters: 2000,
            seed: 0,
            num_bank_solutions: 10,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadConfig(format!("ACO: {msg}")));
        if self.archive_size < 2 {
            return bad("archive size must be at least 2");
        }
        if self.ants_per_iter == 0 {
            return bad("at least one ant per iteration is required");
        }
        if !(self.locality > 0.0) || !(self.evaporation > 0.0) {
            return bad("locality and evaporation must be positive");
        }
        if self.num_bank_solutions > self.archive_size {
            return bad("cannot export more solutions than the archive holds");
        }
        Ok(())
    }
}

fn by_objective(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> Ordering {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    key(a.1).total_cmp(&key(b.1))
}

/// Kernel weight `omega_l` for the 1-based rank `l` of an archive of size `k`.
pub fn kernel_weight(rank: usize, k: usize, q: f64) -> f64 {
    let qk = q * k as f64;
    let l = (rank - 1) as f64;
    libm::exp(-l * l / (2.0 * qk * qk)) / (qk * libm::sqrt(2.0 * core::f64::consts::PI))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Archive {
    entries: Vec<(Vec<f64>, f64)>,
    cumulative: Vec<f64>,
}

impl Archive {
    pub fn new(mut entries: Vec<(Vec<f64>, f64)>, locality: f64) -> Self {
        entries.sort_by(by_objective);
        let k = entries.len();
        let mut acc = 0.0;
        let cumulative = (1..=k)
            .map(|l| {
                acc += kernel_weight(l, k, locality);
                acc
            })
            .collect();
        Self { entries, cumulative }
    }

    pub fn entries(&self) -> &[(Vec<f64>, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn best(&self) -> &(Vec<f64>, f64) {
        &self.entries[0]
    }

    /// Merges candidates and keeps the best `len()` entries.
    pub fn update(&mut self, candidates: Vec<(Vec<f64>, f64)>) {
        let k = self.entries.len();
        self.entries.extend(candidates);
        self.entries.sort_by(by_objective);
        self.entries.truncate(k);
    }

    /// Probability that kernel `l` (0-based) is chosen.
    pub fn selection_probability(&self, l: usize) -> f64 {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let lo = if l == 0 { 0.0 } else { self.cumulative[l - 1] };
        (self.cumulative[l] - lo) / total
    }

    pub fn pick_kernel<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng.random::<f64>() * total;
        self.cumulative.iter().position(|&c| u < c).unwrap_or(0)
    }

    /// Width of kernel `l` along dimension `i`: `xi` times the mean absolute
    /// distance of the other entries from entry `l`.
    pub fn kernel_width(&self, l: usize, i: usize, evaporation: f64) -> f64 {
        let k = self.entries.len();
        let centre = self.entries[l].0[i];
        let spread: f64 = self.entries.iter().map(|(s, _)| (s[i] - centre).abs()).sum();
        evaporation * spread / (k - 1) as f64
    }

    /// Draws one ant: a kernel by rank, then a Gaussian coordinate per dimension.
    pub fn sample_ant<R: Rng>(&self, cfg: &AcoConfig, bounds: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
        let l = self.pick_kernel(rng);
        let centre = &self.entries[l].0;
        (0..centre.len())
            .map(|i| {
                let sigma = self.kernel_width(l, i, cfg.evaporation);
                let z: f64 = rng.sample(StandardNormal);
                (centre[i] + sigma * z).clamp(bounds[i].0, bounds[i].1)
            })
            .collect()
    }

}

/// The best `capacity` mutually distinct solutions seen so far. A converged
/// archive can shrink below the duplicate tolerance, so exports draw on
/// entries from every iteration rather than the final archive alone.
#[derive(Clone, Debug, PartialEq)]
pub struct ElitePool {
    capacity: usize,
    items: Vec<(Vec<f64>, f64)>,
}

impl ElitePool {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, items: Vec::with_capacity(capacity + 1) }
    }

    pub fn offer(&mut self, x: &[f64], f: f64) {
        if self.capacity == 0 || f.is_nan() {
            return;
        }
        if let Some(i) = self.items.iter().position(|o| dist_inf(&o.0, x) <= DUPLICATE_TOL) {
            if f < self.items[i].1 {
                self.items[i] = (x.to_vec(), f);
                self.items.sort_by(by_objective);
            }
            return;
        }
        if self.items.len() < self.capacity || f < self.items[self.items.len() - 1].1 {
            self.items.push((x.to_vec(), f));
            self.items.sort_by(by_objective);
            self.items.truncate(self.capacity);
        }
    }

    pub fn into_vec(self) -> Vec<(Vec<f64>, f64)> {
        self.items
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcoResult {
    /// Distinct best solutions, ascending by objective.
    pub solutions: Vec<(Vec<f64>, f64)>,
    /// Best objective in the archive after initialization and after each iteration.
    pub best_history: Vec<f64>,
    pub evaluations: usize,
}

pub fn aco_minimize<F: FnMut(&[f64]) -> f64>(objective: F, bounds: &[(f64, f64)], cfg: &AcoConfig) -> Result<AcoResult> {
    aco_minimize_seeded(objective, bounds, cfg, &[])
}

/// Like [`aco_minimize`], with `seeds` replacing the first random archive entries.
pub fn aco_minimize_seeded<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    bounds: &[(f64, f64)],
    cfg: &AcoConfig,
    seeds: &[Vec<f64>],
) -> Result<AcoResult> {
    cfg.validate()?;
    let n = bounds.len();
    if n == 0 {
        return Err(Error::BadConfig("ACO: empty search domain".into()));
    }
    if let Some(i) = bounds.iter().position(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::BadConfig(format!("ACO: invalid bounds for dimension {i}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluations = 0;
    let mut elite = ElitePool::new(cfg.num_bank_solutions);
    let mut initial = Vec::with_capacity(cfg.archive_size);
    for k in 0..cfg.archive_size {
        let x: Vec<f64> = match seeds.get(k) {
            Some(s) => {
                check_dim(n, s.len())?;
                s.iter().zip(bounds).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect()
            }
            None => bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect(),
        };
        let f = objective(&x);
        evaluations += 1;
        elite.offer(&x, f);
        initial.push((x, f));
    }
    let mut archive = Archive::new(initial, cfg.locality);
    let mut best_history = Vec::with_capacity(cfg.max_iters + 1);
    best_history.push(archive.best().1);
    for _ in 0..cfg.max_iters {
        let ants: Vec<(Vec<f64>, f64)> = (0..cfg.ants_per_iter)
            .map(|_| {
                let x = archive.sample_ant(cfg, bounds, &mut rng);
                let f = objective(&x);
                (x, f)
            })
            .collect();
        evaluations += ants.len();
        for (x, f) in &ants {
            elite.offer(x, *f);
        }
        archive.update(ants);
        best_history.push(archive.best().1);
    }
    Ok(AcoResult { solutions: elite.into_vec(), best_history, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn sphere_converges() {
        let cfg = AcoConfig { seed: 1, ..AcoConfig::default() };
        let res = aco_minimize(sphere, &[(-5.0, 5.0); 5], &cfg).unwrap();
        assert!(res.solutions[0].1 <= 1e-6, "best {}", res.solutions[0].1);
        assert_eq!(res.solutions.len(), 10);
        for w in res.best_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in res.solutions.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn constant_landscape() {
        let cfg = AcoConfig { max_iters: 20, ..AcoConfig::default() };
        let res = aco_minimize(|_| 3.0, &[(0.0, 1.0); 3], &cfg).unwrap();
        assert!(res.solutions.iter().all(|(x, f)| *f == 3.0 && x.iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn collapsed_archive_samples_its_point() {
        let point = vec![0.3, 0.7];
        let archive = Archive::new(vec![(point.clone(), 1.0); 4], 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = AcoConfig::default();
        for _ in 0..10 {
            assert_eq!(archive.sample_ant(&cfg, &[(0.0, 1.0); 2], &mut rng), point);
        }
    }

    #[test]
    fn kernel_width_formula() {
        let archive = Archive::new(vec![(vec![0.0], 0.0), (vec![1.0], 1.0)], 0.5);
        assert_abs_diff_eq!(archive.kernel_width(0, 0, 1.0), 1.0);
    }

    #[test]
    fn small_locality_selects_the_best_kernel() {
        let entries: Vec<_> = (0..50).map(|i| (vec![i as f64], i as f64)).collect();
        let archive = Archive::new(entries, 1e-4);
        assert_abs_diff_eq!(archive.selection_probability(0), 1.0, epsilon = 1e-12);
        let spread = Archive::new((0..50).map(|i| (vec![i as f64], i as f64)).collect(), 0.5);
        assert!(spread.selection_probability(0) < 0.1);
    }

    #[test]
    fn elite_pool_keeps_distinct_best() {
        let mut pool = ElitePool::new(2);
        pool.offer(&[0.0], 3.0);
        pool.offer(&[0.0], 2.0);
        pool.offer(&[1.0], 5.0);
        pool.offer(&[2.0], 4.0);
        pool.offer(&[3.0], 9.0);
        assert_eq!(pool.into_vec(), vec![(vec![0.0], 2.0), (vec![2.0], 4.0)]);
    }

    #[test]
    fn bad_configs() {
        let bounds = [(0.0, 1.0)];
        for cfg in [
            AcoConfig { archive_size: 1, num_bank_solutions: 1, ..AcoConfig::default() },
            AcoConfig { ants_per_iter: 0, ..AcoConfig::default() },
            AcoConfig { locality: 0.0, ..AcoConfig::default() },
            AcoConfig { num_bank_solutions: 51, ..AcoConfig::default() },
        ] {
            assert!(matches!(aco_minimize(sphere, &bounds, &cfg), Err(Error::BadConfig(_))));
        }
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let cfg = AcoConfig { max_iters: 200, seed: 9, ..AcoConfig::default() };
        let a = aco_minimize(sphere, &[(-1.0, 1.0); 3], &cfg).unwrap();
        let b = aco_minimize(sphere, &[(-1.0, 1.0); 3], &cfg).unwrap();
        assert_eq!(a, b);
    }
}
