//! Simulated annealing super-agent with solution-bank guided neighbourhoods.
//!
//! Each trial looks up the bank entry nearest to the current state, moves a
//! random fraction of the way towards it along the coordinates selected by a
//! decision vector, and adds temperature-scaled uniform noise. Proposals are
//! accepted by the Metropolis rule under a geometric cooling schedule.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bank::SolutionBank;
use crate::error::{Error, Result};
use crate::formulations::WeightVector;

/// Which coordinates a trial perturbs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// One random 0/1 vector per temperature epoch, reused by every trial in it.
    #[serde(alias = "I")]
    Similar,
    /// A fresh random 0/1 vector for every trial.
    #[serde(alias = "II")]
    Varying,
    /// All coordinates, always.
    #[default]
    #[serde(alias = "III")]
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealingConfig {
    pub t_max: f64,
    pub t_frozen: f64,
    pub cooling_factor: f64,
    pub trials_per_temp: usize,
    pub strategy: Strategy,
    /// Probability that a coordinate is selected under strategies I and II.
    pub tau: f64,
    /// Step multiplier towards the nearest bank entry; values above 1 overshoot.
    pub eta: f64,
    /// Half-width of the uniform noise at `t_max`, shrinking linearly with temperature.
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            t_frozen: 1e-4,
            cooling_factor: 0.95,
            trials_per_temp: 200,
            strategy: Strategy::All,
            tau: 0.5,
            eta: 1.0,
            noise_scale: 0.05,
            seed: 0,
        }
    }
}

impl AnnealingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadConfig(format!("annealing: {msg}")));
        if !(self.t_max > 0.0 && self.t_frozen > 0.0) || !self.t_max.is_finite() {
            return bad("temperatures must be positive and finite");
        }
        if self.t_frozen > self.t_max {
            return bad("frozen temperature exceeds the initial temperature");
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return bad("cooling factor must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad("tau must lie in [0, 1]");
        }
        if !(self.eta > 0.0) || !(self.noise_scale >= 0.0) {
            return bad("eta must be positive and noise_scale non-negative");
        }
        Ok(())
    }
}

/// `t_max, t_max c, t_max c^2, ...` up to the last value not below `t_frozen`.
pub fn temperature_schedule(cfg: &AnnealingConfig) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = cfg.t_max;
    while t >= cfg.t_frozen {
        out.push(t);
        t *= cfg.cooling_factor;
    }
    out
}

/// Decision vectors for one annealing run; caches the epoch vector for strategy I.
#[derive(Clone, Debug)]
pub struct DecisionVectors {
    strategy: Strategy,
    tau: f64,
    epoch: Option<Vec<bool>>,
}

impl DecisionVectors {
    pub fn new(strategy: Strategy, tau: f64) -> Self {
        Self { strategy, tau, epoch: None }
    }

    /// Forgets the cached vector so the next epoch draws its own.
    pub fn start_epoch(&mut self) {
        self.epoch = None;
    }

    pub fn next<R: Rng>(&mut self, n: usize, rng: &mut R) -> Vec<bool> {
        match self.strategy {
            Strategy::All => vec![true; n],
            Strategy::Varying => draw_decision(n, self.tau, rng),
            Strategy::Similar => {
                let tau = self.tau;
                self.epoch.get_or_insert_with(|| draw_decision(n, tau, rng)).clone()
            }
        }
    }
}

/// Bernoulli(`tau`) coordinates; all-zero draws are redrawn so some coordinate moves.
pub fn draw_decision<R: Rng>(n: usize, tau: f64, rng: &mut R) -> Vec<bool> {
    for _ in 0..64 {
        let d: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < tau).collect();
        if d.iter().any(|&b| b) || n == 0 {
            return d;
        }
    }
    // Only reachable for tiny tau: pick one coordinate outright.
    let mut d = vec![false; n];
    d[rng.random_range(0..n)] = true;
    d
}

/// One neighbour step: `clamp(x + d (u eta (b - x) + z), 0, 1)` coordinatewise.
pub fn neighbor_step(x: &[f64], target: &[f64], decision: &[bool], step: &[f64], noise: &[f64], eta: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if decision[i] {
                (x[i] + step[i] * eta * (target[i] - x[i]) + noise[i]).clamp(0.0, 1.0)
            } else {
                x[i]
            }
        })
        .collect()
}

/// Proposes a neighbour of `x` guided by its nearest bank entry, recording the hit.
pub fn propose_neighbor<R: Rng>(
    x: &[f64],
    bank: &mut SolutionBank,
    cfg: &AnnealingConfig,
    temperature: f64,
    decision: &[bool],
    rng: &mut R,
) -> Result<(Vec<f64>, usize)> {
    let (nearest, _) = bank.nearest(x)?;
    let amplitude = cfg.noise_scale * temperature / cfg.t_max;
    let n = x.len();
    let mut step = vec![0.0; n];
    let mut noise = vec![0.0; n];
    for i in 0..n {
        if decision[i] {
            step[i] = rng.random::<f64>();
            if amplitude > 0.0 {
                noise[i] = rng.random_range(-amplitude..amplitude);
            }
        }
    }
    let target = &bank.entries()[nearest].x;
    Ok((neighbor_step(x, target, decision, &step, &noise, cfg.eta), nearest))
}

/// Downhill moves always pass; uphill ones with probability `exp(-delta / T)`.
pub fn metropolis_accept<R: Rng>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        return true;
    }
    rng.random::<f64>() < libm::exp(-delta / temperature)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub temperature: f64,
    pub nearest_entry: usize,
    pub proposed: Vec<f64>,
    pub accepted: bool,
    pub objective: f64,
    pub best_objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealingTrace {
    pub records: Vec<TrialRecord>,
    /// Bank entry the chain started from.
    pub initial_entry: usize,
    pub initial_objective: f64,
    pub best_x: Vec<f64>,
    pub best_objective: f64,
}

/// Runs the chain from the bank entry that scores best under `objective`.
/// The bank's hit counters record one nearest-entry query per trial.
pub fn anneal<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    bank: &mut SolutionBank,
    cfg: &AnnealingConfig,
) -> Result<(WeightVector, AnnealingTrace)> {
    cfg.validate()?;
    if bank.is_empty() {
        return Err(Error::EmptyBank);
    }
    let mut initial_entry = 0;
    let mut initial_objective = f64::INFINITY;
    for (i, e) in bank.entries().iter().enumerate() {
        let f = objective(&e.x);
        if f < initial_objective || (i == 0 && !(initial_objective < f)) {
            initial_entry = i;
            initial_objective = f;
        }
    }
    let mut current = bank.entries()[initial_entry].x.clone();
    let mut f_current = initial_objective;
    let mut best_x = current.clone();
    let mut best_objective = initial_objective;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut decisions = DecisionVectors::new(cfg.strategy, cfg.tau);
    let schedule = temperature_schedule(cfg);
    let mut records = Vec::with_capacity(schedule.len() * cfg.trials_per_temp);
    for &t in &schedule {
        decisions.start_epoch();
        for _ in 0..cfg.trials_per_temp {
            let d = decisions.next(current.len(), &mut rng);
            let (proposed, nearest_entry) = propose_neighbor(&current, bank, cfg, t, &d, &mut rng)?;
            let f = objective(&proposed);
            let accepted = metropolis_accept(f - f_current, t, &mut rng);
            if f < best_objective {
                best_objective = f;
                best_x = proposed.clone();
            }
            records.push(TrialRecord {
                trial: records.len(),
                temperature: t,
                nearest_entry,
                proposed: proposed.clone(),
                accepted,
                objective: f,
                best_objective,
            });
            if accepted {
                current = proposed;
                f_current = f;
            }
        }
    }
    let best = WeightVector::with_agent(best_x.clone(), "SA");
    Ok((best, AnnealingTrace { records, initial_entry, initial_objective, best_x, best_objective }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{AgentClass, BankEntry};
    use approx::assert_abs_diff_eq;

    fn bank_of(points: &[Vec<f64>]) -> SolutionBank {
        let mut bank = SolutionBank::new(points[0].len());
        for (i, p) in points.iter().enumerate() {
            bank.add(BankEntry::new(p.clone(), alloc::format!("B{i}"), AgentClass::Deterministic, 0.0)).unwrap();
        }
        bank
    }

    #[test]
    fn schedule_examples() {
        let cfg = AnnealingConfig { t_max: 100.0, cooling_factor: 0.9, t_frozen: 1.0, ..Default::default() };
        assert_abs_diff_eq!(temperature_schedule(&cfg)[1], 90.0, epsilon = 1e-12);
        let single = AnnealingConfig { t_max: 1.0, t_frozen: 1.0, ..Default::default() };
        assert_eq!(temperature_schedule(&single), vec![1.0]);
        let halving = AnnealingConfig { t_max: 100.0, cooling_factor: 0.5, t_frozen: 10.0, ..Default::default() };
        assert_eq!(temperature_schedule(&halving), vec![100.0, 50.0, 25.0, 12.5]);
    }

    #[test]
    fn decision_vector_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(DecisionVectors::new(Strategy::All, 0.1).next(5, &mut rng), vec![true; 5]);
        for s in [Strategy::Similar, Strategy::Varying] {
            assert_eq!(DecisionVectors::new(s, 1.0).next(4, &mut rng), vec![true; 4]);
        }
        for _ in 0..100 {
            assert!(draw_decision(3, 0.01, &mut rng).iter().any(|&b| b));
        }
        assert_eq!(draw_decision(3, 0.0, &mut rng).iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn similar_strategy_reuses_within_epoch() {
        let mut changed = false;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut dv = DecisionVectors::new(Strategy::Similar, 0.5);
            let first = dv.next(8, &mut rng);
            assert_eq!(dv.next(8, &mut rng), first);
            dv.start_epoch();
            changed |= dv.next(8, &mut rng) != first;
        }
        assert!(changed);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut dv = DecisionVectors::new(Strategy::Varying, 0.5);
        let draws: Vec<_> = (0..20).map(|_| dv.next(8, &mut rng)).collect();
        assert!(draws.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn full_step_lands_on_the_bank_entry() {
        let x = neighbor_step(&[0.0, 1.0], &[1.0, 0.0], &[true, true], &[1.0, 1.0], &[0.0, 0.0], 1.0);
        assert_eq!(x, vec![1.0, 0.0]);
    }

    #[test]
    fn proposal_at_bank_entry_without_noise_is_stationary() {
        let mut bank = bank_of(&[vec![0.2, 0.8], vec![0.9, 0.1]]);
        let cfg = AnnealingConfig { noise_scale: 0.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, idx) = propose_neighbor(&[0.2, 0.8], &mut bank, &cfg, 1.0, &[true, true], &mut rng).unwrap();
        assert_eq!((x, idx), (vec![0.2, 0.8], 0));
        let mut empty = SolutionBank::new(2);
        assert_eq!(propose_neighbor(&[0.2, 0.8], &mut empty, &cfg, 1.0, &[true, true], &mut rng), Err(Error::EmptyBank));
    }

    #[test]
    fn metropolis_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(metropolis_accept(-1.0, 0.5, &mut rng));
        assert!(metropolis_accept(0.0, 0.5, &mut rng));
        let t = 0.3;
        let accepted = (0..100_000).filter(|_| metropolis_accept(t * core::f64::consts::LN_2, t, &mut rng)).count();
        assert_abs_diff_eq!(accepted as f64 / 1e5, 0.5, epsilon = 0.01);
    }

    #[test]
    fn best_never_worse_than_bank() {
        let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let mut bank = bank_of(&[vec![0.9, 0.2, 0.4, 0.5, 0.1], vec![0.3, 0.3, 0.6, 0.2, 0.8], vec![0.5; 5]]);
        let bank_min = bank.entries().iter().map(|e| sphere(&e.x)).fold(f64::INFINITY, f64::min);
        let cfg = AnnealingConfig { trials_per_temp: 20, ..Default::default() };
        let (best, trace) = anneal(sphere, &mut bank, &cfg).unwrap();
        assert!(trace.best_objective <= bank_min);
        assert_eq!(sphere(&best.x), trace.best_objective);
        assert_eq!(trace.records.len(), temperature_schedule(&cfg).len() * 20);
        assert_eq!(bank.total_hits() as usize, trace.records.len());
        assert!(trace.records.iter().all(|r| r.proposed.iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn optimum_in_bank_is_kept() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2);
        let mut bank = bank_of(&[vec![1.0, 0.0], vec![0.3, 0.7]]);
        let cfg = AnnealingConfig { noise_scale: 0.0, trials_per_temp: 10, ..Default::default() };
        let (best, trace) = anneal(f, &mut bank, &cfg).unwrap();
        assert_eq!(best.x, vec![0.3, 0.7]);
        assert_eq!(trace.initial_entry, 1);
        assert!(trace.records.iter().all(|r| r.proposed == vec![0.3, 0.7]));
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut bank = bank_of(&[vec![0.5, 0.5]]);
        for cfg in [
            AnnealingConfig { cooling_factor: 1.0, ..Default::default() },
            AnnealingConfig { t_frozen: 2.0, ..Default::default() },
            AnnealingConfig { tau: 1.5, ..Default::default() },
        ] {
            assert!(matches!(anneal(|_| 0.0, &mut bank, &cfg), Err(Error::BadConfig(_))));
        }
        assert!(matches!(anneal(|_| 0.0, &mut SolutionBank::new(2), &AnnealingConfig::default()), Err(Error::EmptyBank)));
    }
}
