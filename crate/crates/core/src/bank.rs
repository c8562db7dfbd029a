//! The solution bank: optimal weight vectors contributed by solver agents,
//! queried by nearest neighbour during the annealing search.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::formulations::INEQ_TOL;
use crate::linalg::{dist2, dist_inf};

/// Entries closer than this in the max norm are treated as the same solution.
pub const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentClass {
    Deterministic,
    Domain,
    Stochastic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankEntry {
    pub x: Vec<f64>,
    pub agent_id: String,
    pub agent_class: AgentClass,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    /// Objective value under the contributing agent's own formulation.
    pub source_objective: f64,
}

impl BankEntry {
    pub fn new(x: Vec<f64>, agent_id: impl Into<String>, agent_class: AgentClass, source_objective: f64) -> Self {
        Self { x, agent_id: agent_id.into(), agent_class, params: BTreeMap::new(), source_objective }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    /// `key=value` pairs joined by `;`, in key order.
    pub fn params_label(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(k);
            out.push('=');
            out.push_str(v);
        }
        out
    }
}

/// Hits accumulated by all entries sharing one provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclination {
    pub agent_id: String,
    pub params: String,
    pub hits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionBank {
    pub n: usize,
    entries: Vec<BankEntry>,
    hit_counts: Vec<u64>,
    #[serde(skip)]
    duplicates: usize,
}

impl SolutionBank {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new(), hit_counts: Vec::new(), duplicates: 0 }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    pub fn hit_counts(&self) -> &[u64] {
        &self.hit_counts
    }

    /// Entries dropped by [`add`](Self::add) as duplicates.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates
    }

    /// Appends `entry` unless an existing entry lies within [`DUPLICATE_TOL`].
    /// Returns whether the entry was stored.
    pub fn add(&mut self, entry: BankEntry) -> Result<bool> {
        check_dim(self.n, entry.x.len())?;
        if let Some(index) = entry.x.iter().position(|v| !(-INEQ_TOL..=1.0 + INEQ_TOL).contains(v)) {
            return Err(Error::OutOfBounds { index });
        }
        if self.entries.iter().any(|e| dist_inf(&e.x, &entry.x) <= DUPLICATE_TOL) {
            self.duplicates += 1;
            log::debug!("dropping duplicate bank entry from {} ({})", entry.agent_id, entry.params_label());
            return Ok(false);
        }
        self.entries.push(entry);
        self.hit_counts.push(0);
        Ok(true)
    }

    /// Index of and Euclidean distance to the closest entry; ties go to the lowest index.
    pub fn closest(&self, x: &[f64]) -> Result<(usize, f64)> {
        check_dim(self.n, x.len())?;
        let mut best: Option<(usize, f64)> = None;
        for (i, e) in self.entries.iter().enumerate() {
            let d = dist2(&e.x, x);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.ok_or(Error::EmptyBank)
    }

    /// [`closest`](Self::closest), recording a hit for the winner.
    pub fn nearest(&mut self, x: &[f64]) -> Result<(usize, f64)> {
        let (i, d) = self.closest(x)?;
        self.hit_counts[i] += 1;
        Ok((i, d))
    }

    pub fn total_hits(&self) -> u64 {
        self.hit_counts.iter().sum()
    }

    pub fn reset_hits(&mut self) {
        self.hit_counts.iter_mut().for_each(|h| *h = 0);
    }

    /// Hit counts aggregated by `(agent_id, params)`, in order of first appearance.
    pub fn inclinations(&self) -> Vec<Inclination> {
        let mut out: Vec<Inclination> = Vec::new();
        let mut index: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (e, &h) in self.entries.iter().zip(&self.hit_counts) {
            let key = (e.agent_id.clone(), e.params_label());
            match index.get(&key) {
                Some(&i) => out[i].hits += h,
                None => {
                    index.insert(key.clone(), out.len());
                    out.push(Inclination { agent_id: key.0, params: key.1, hits: h });
                }
            }
        }
        out
    }

    /// Checks the invariants a deserialized bank must satisfy.
    pub fn validate(&self) -> Result<()> {
        check_dim(self.entries.len(), self.hit_counts.len())?;
        for e in &self.entries {
            check_dim(self.n, e.x.len())?;
        }
        Ok(())
    }
}
