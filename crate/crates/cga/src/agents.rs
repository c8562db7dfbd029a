//! Solver-agent roster and the stage that fills the solution bank.

use std::time::Instant;

use cga_core::acor::{aco_minimize_seeded, AcoConfig};
use cga_core::formulations::{equal_weights, penalty_objective, portfolio_variance};
use cga_core::solvers::{
    markowitz_sweep, robust_sweep, solve_erc, solve_ew, solve_gmv, solve_mdp_dr, solve_mdp_rw, MultiStart,
};
use cga_core::{AgentClass, BankEntry, MarketEstimates, PenaltyMode, PenaltyParams, SolutionBank, SolveStatus};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    MarkowitzSingle,
    MarkowitzMulti,
    Robust,
    Ew,
    Gmv,
    MdpDr,
    MdpRw,
    Erc,
    Aco,
}

impl AgentKind {
    pub fn class(self) -> AgentClass {
        match self {
            AgentKind::MarkowitzSingle | AgentKind::MarkowitzMulti => AgentClass::Deterministic,
            AgentKind::Aco => AgentClass::Stochastic,
            _ => AgentClass::Domain,
        }
    }

    /// Whether the agent accepts a `seed` parameter.
    pub fn is_seeded(self) -> bool {
        matches!(self, AgentKind::MarkowitzMulti | AgentKind::Gmv | AgentKind::MdpDr | AgentKind::Erc | AgentKind::Aco)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleStartParams {
    #[serde(default = "num_points", alias = "MMPT_NUM_POINTS")]
    num_points: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiStartParams {
    #[serde(default = "num_points", alias = "MMPT_NUM_POINTS")]
    num_points: usize,
    #[serde(default = "start_count")]
    starts: usize,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StartParams {
    #[serde(default = "start_count")]
    starts: usize,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RobustAgentParams {
    #[serde(default = "gamma_increment", alias = "ROBUST_GAMMA_INCREMENT")]
    increment: f64,
}

#[derive(Deserialize)]
struct AcoAgentParams {
    #[serde(flatten)]
    cfg: AcoConfig,
    #[serde(default)]
    ew_warm_start: bool,
}

const ACO_KEYS: [&str; 9] = [
    "archive_size",
    "locality",
    "evaporation",
    "ants_per_iter",
    "max_iters",
    "seed",
    "num_bank_solutions",
    "NUM_SOLUTIONS_ACO",
    "ew_warm_start",
];

fn num_points() -> usize {
    15
}

fn start_count() -> usize {
    MultiStart::DEFAULT_COUNT
}

fn gamma_increment() -> f64 {
    0.5
}

/// A validated agent ready to run.
#[derive(Clone, Debug, PartialEq)]
pub enum Agent {
    Markowitz { num_points: usize, starts: MultiStart },
    Robust { increment: f64 },
    Ew,
    Gmv(MultiStart),
    MdpDr(MultiStart),
    MdpRw,
    Erc(MultiStart),
    Aco { cfg: AcoConfig, ew_warm_start: bool },
}

impl AgentSpec {
    pub fn new(id: &str, kind: AgentKind) -> Self {
        Self { id: id.into(), kind, params: Map::new() }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    fn params_as<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(Value::Object(self.params.clone()))
            .map_err(|e| Error::Config(format!("agent {}: {e}", self.id)))
    }

    pub fn parse(&self) -> Result<Agent> {
        let bad = |msg: String| Err(Error::Config(format!("agent {}: {msg}", self.id)));
        if self.id.is_empty() {
            return bad("empty id".into());
        }
        let agent = match self.kind {
            AgentKind::MarkowitzSingle => {
                let p: SingleStartParams = self.params_as()?;
                Agent::Markowitz { num_points: p.num_points, starts: MultiStart::single() }
            }
            AgentKind::MarkowitzMulti => {
                let p: MultiStartParams = self.params_as()?;
                Agent::Markowitz { num_points: p.num_points, starts: MultiStart::new(p.starts, p.seed) }
            }
            AgentKind::Robust => {
                let p: RobustAgentParams = self.params_as()?;
                if !(p.increment > 0.0) || !p.increment.is_finite() {
                    return bad(format!("gamma increment must be positive, got {}", p.increment));
                }
                Agent::Robust { increment: p.increment }
            }
            AgentKind::Ew | AgentKind::MdpRw => {
                let NoParams {} = self.params_as()?;
                if self.kind == AgentKind::Ew {
                    Agent::Ew
                } else {
                    Agent::MdpRw
                }
            }
            AgentKind::Gmv | AgentKind::MdpDr | AgentKind::Erc => {
                let p: StartParams = self.params_as()?;
                let ms = MultiStart::new(p.starts, p.seed);
                match self.kind {
                    AgentKind::Gmv => Agent::Gmv(ms),
                    AgentKind::MdpDr => Agent::MdpDr(ms),
                    _ => Agent::Erc(ms),
                }
            }
            AgentKind::Aco => {
                if let Some(k) = self.params.keys().find(|k| !ACO_KEYS.contains(&k.as_str())) {
                    return bad(format!("unknown parameter `{k}`"));
                }
                let p: AcoAgentParams = self.params_as()?;
                p.cfg.validate().map_err(|e| Error::Config(format!("agent {}: {e}", self.id)))?;
                Agent::Aco { cfg: p.cfg, ew_warm_start: p.ew_warm_start }
            }
        };
        if let Agent::Markowitz { num_points, .. } = agent {
            if num_points < 2 {
                return bad(format!("at least 2 return targets are needed, got {num_points}"));
            }
        }
        Ok(agent)
    }
}

/// The nine-agent roster A1 to A9 with its standard parameters.
pub fn default_roster() -> Vec<AgentSpec> {
    vec![
        AgentSpec::new("A1", AgentKind::MarkowitzSingle).with_param("MMPT_NUM_POINTS", 15),
        AgentSpec::new("A2", AgentKind::MarkowitzMulti).with_param("MMPT_NUM_POINTS", 15),
        AgentSpec::new("A3", AgentKind::Robust).with_param("ROBUST_GAMMA_INCREMENT", 0.5),
        AgentSpec::new("A4", AgentKind::Ew),
        AgentSpec::new("A5", AgentKind::Gmv),
        AgentSpec::new("A6", AgentKind::MdpDr),
        AgentSpec::new("A7", AgentKind::MdpRw),
        AgentSpec::new("A8", AgentKind::Erc),
        AgentSpec::new("A9", AgentKind::Aco).with_param("NUM_SOLUTIONS_ACO", 10),
    ]
}

/// Penalty objective shared by the stochastic agent and the annealer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub params: PenaltyParams,
    pub mode: PenaltyMode,
}

impl Penalty {
    pub fn value(&self, x: &[f64], est: &MarketEstimates) -> f64 {
        penalty_objective(x, est, &self.params, self.mode).unwrap_or(f64::INFINITY)
    }
}

/// One candidate solution produced by an agent.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub entry: BankEntry,
    pub status: SolveStatus,
}

fn candidate(x: Vec<f64>, spec: &AgentSpec, objective: f64, status: SolveStatus) -> Candidate {
    Candidate { entry: BankEntry::new(x, spec.id.clone(), spec.kind.class(), objective), status }
}

pub fn run_agent(spec: &AgentSpec, agent: &Agent, est: &MarketEstimates, penalty: &Penalty) -> Result<Vec<Candidate>> {
    let n = est.n;
    let out = match agent {
        Agent::Markowitz { num_points, starts } => markowitz_sweep(est, *num_points, starts)?
            .into_iter()
            .enumerate()
            .map(|(k, rep)| {
                let rp = est.r.iter().zip(&rep.x.x).map(|(a, b)| a * b).sum::<f64>();
                let mut c = candidate(rep.x.x, spec, rep.objective, rep.status);
                c.entry = c.entry.with_param("rp_index", k + 1).with_param("portfolio_return", rp);
                c
            })
            .collect(),
        Agent::Robust { increment } => robust_sweep(est, *increment)?
            .into_iter()
            .map(|sol| {
                let mut c = candidate(sol.report.x.x, spec, sol.report.objective, sol.report.status);
                c.entry = c.entry.with_param("gamma", sol.params.gamma);
                c
            })
            .collect(),
        Agent::Ew => {
            let x = solve_ew(n)?.x;
            let v = portfolio_variance(&x, est)?;
            vec![candidate(x, spec, v, SolveStatus::Optimal)]
        }
        Agent::Gmv(ms) => {
            let rep = solve_gmv(est, ms)?;
            vec![candidate(rep.x.x, spec, rep.objective, rep.status)]
        }
        Agent::MdpDr(ms) => {
            let rep = solve_mdp_dr(est, ms)?;
            vec![candidate(rep.x.x, spec, rep.objective, rep.status)]
        }
        Agent::MdpRw => {
            let sol = solve_mdp_rw(est)?;
            vec![candidate(sol.report.x.x, spec, sol.report.objective, sol.report.status)]
        }
        Agent::Erc(ms) => {
            let rep = solve_erc(est, ms)?;
            vec![candidate(rep.x.x, spec, rep.objective, rep.status)]
        }
        Agent::Aco { cfg, ew_warm_start } => {
            let seeds = if *ew_warm_start { vec![equal_weights(n)] } else { vec![] };
            let res = aco_minimize_seeded(|x| penalty.value(x, est), &vec![(0.0, 1.0); n], cfg, &seeds)?;
            res.solutions
                .into_iter()
                .enumerate()
                .map(|(k, (x, f))| {
                    let mut c = candidate(x, spec, f, SolveStatus::Optimal);
                    c.entry = c.entry.with_param("rank", k + 1);
                    c
                })
                .collect()
        }
    };
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub id: String,
    pub kind: AgentKind,
    pub class: AgentClass,
    pub solutions: usize,
    pub not_optimal: usize,
    pub added: usize,
    pub duplicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_source_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct AgentsOutcome {
    pub bank: SolutionBank,
    pub summaries: Vec<AgentSummary>,
    /// Candidates offered to the bank before duplicates were dropped.
    pub offered: usize,
}

/// Runs the roster and collects every solution into a fresh bank, in roster order.
/// Agents that fail are recorded in their summary; the stage fails only when none succeed.
pub fn run_agents(est: &MarketEstimates, roster: &[AgentSpec], penalty: &Penalty, parallel: bool) -> Result<AgentsOutcome> {
    if roster.is_empty() {
        return Err(Error::Config("agents: roster is empty".into()));
    }
    let agents = roster.iter().map(AgentSpec::parse).collect::<Result<Vec<_>>>()?;
    let timed = |spec: &AgentSpec, agent: &Agent| {
        let start = Instant::now();
        let res = run_agent(spec, agent, est, penalty);
        log::info!("agent {} ({:?}) finished in {:.2?}", spec.id, spec.kind, start.elapsed());
        res
    };
    let results: Vec<Result<Vec<Candidate>>> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = roster.iter().zip(&agents).map(|(spec, a)| s.spawn(move || timed(spec, a))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(Error::Config("agent thread panicked".into()))))
                .collect()
        })
    } else {
        roster.iter().zip(&agents).map(|(spec, a)| timed(spec, a)).collect()
    };

    let mut bank = SolutionBank::new(est.n);
    let mut summaries = Vec::with_capacity(roster.len());
    let mut offered = 0;
    for (spec, res) in roster.iter().zip(results) {
        let mut summary = AgentSummary {
            id: spec.id.clone(),
            kind: spec.kind,
            class: spec.kind.class(),
            solutions: 0,
            not_optimal: 0,
            added: 0,
            duplicates: 0,
            best_source_objective: None,
            error: None,
        };
        match res {
            Ok(cands) => {
                for c in cands {
                    summary.solutions += 1;
                    if c.status != SolveStatus::Optimal {
                        summary.not_optimal += 1;
                    }
                    if c.status == SolveStatus::Infeasible {
                        continue;
                    }
                    let f = c.entry.source_objective;
                    summary.best_source_objective = Some(summary.best_source_objective.map_or(f, |b: f64| b.min(f)));
                    offered += 1;
                    match bank.add(c.entry) {
                        Ok(true) => summary.added += 1,
                        Ok(false) => summary.duplicates += 1,
                        Err(e) => {
                            log::warn!("agent {}: solution rejected: {e}", spec.id);
                            summary.error.get_or_insert_with(|| e.to_string());
                        }
                    }
                }
            }
            Err(e) => {
                log::warn!("agent {} failed: {e}", spec.id);
                summary.error = Some(e.to_string());
            }
        }
        summaries.push(summary);
    }
    if bank.is_empty() {
        return Err(cga_core::Error::EmptyBank.into());
    }
    log::info!("bank holds {} entries ({} duplicates dropped)", bank.len(), bank.duplicates_dropped());
    Ok(AgentsOutcome { bank, summaries, offered })
}
