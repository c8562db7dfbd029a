//! Run report and the plot-ready CSV exports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cga_core::anneal::AnnealingTrace;
use cga_core::bank::Inclination;
use cga_core::formulations::{portfolio_return, portfolio_variance, sharpe};
use cga_core::solvers::project_simplex_box;
use cga_core::{MarketEstimates, PenaltyMode, PenaltyParams};
use serde::{Deserialize, Serialize};

use crate::agents::AgentSummary;
use crate::error::{Error, Result};
use crate::prices::csv_error;

pub const RISK_RETURN_CSV: &str = "risk_return.csv";
pub const CORRELATION_CSV: &str = "correlation.csv";
pub const INCLINATIONS_CSV: &str = "inclinations.csv";
pub const WEIGHTS_BY_SECTOR_CSV: &str = "weights_by_sector.csv";
pub const TRACE_CSV: &str = "trace.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortfolioStats {
    #[serde(rename = "return")]
    pub ret: f64,
    pub variance: f64,
    pub volatility: f64,
    /// Absent when the portfolio has zero variance.
    pub sharpe: Option<f64>,
}

impl PortfolioStats {
    pub fn of(x: &[f64], est: &MarketEstimates, risk_free: f64) -> Result<Self> {
        let variance = portfolio_variance(x, est)?;
        Ok(Self { ret: portfolio_return(x, est)?, variance, volatility: variance.sqrt(), sharpe: sharpe(x, est, risk_free).ok() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorWeight {
    pub sector: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSummary {
    pub penalty: PenaltyParams,
    pub mode: PenaltyMode,
    /// Lowest penalty objective over all bank entries.
    pub bank_minimum: f64,
    pub bank_minimum_entry: usize,
    /// Best objective found by the annealer (never above `bank_minimum`).
    pub annealed: f64,
    /// Objective of the budget-projected final weights.
    pub projected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankSummary {
    pub entries: usize,
    pub offered: usize,
    pub duplicates_dropped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSummary {
    pub trials: usize,
    pub epochs: usize,
    pub accepted: usize,
    pub initial_entry: usize,
    pub trace_file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub assets: Vec<String>,
    pub sectors: Vec<String>,
    pub raw_weights: Vec<f64>,
    /// `raw_weights` projected onto the long-only budget simplex.
    pub weights: Vec<f64>,
    pub weights_by_sector: Vec<SectorWeight>,
    pub portfolio: PortfolioStats,
    pub objective: ObjectiveSummary,
    pub bank: BankSummary,
    pub inclinations: Vec<Inclination>,
    pub agents: Vec<AgentSummary>,
    pub anneal: AnnealSummary,
}

/// Total weight per sector, sectors in lexicographic order.
pub fn sector_weights(sectors: &[String], x: &[f64]) -> Vec<SectorWeight> {
    let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
    for (s, w) in sectors.iter().zip(x) {
        *totals.entry(s).or_default() += w;
    }
    totals.into_iter().map(|(sector, weight)| SectorWeight { sector: sector.to_string(), weight }).collect()
}

pub struct ReportInputs<'a> {
    pub assets: &'a [String],
    pub sectors: &'a [String],
    pub est: &'a MarketEstimates,
    pub penalty: crate::agents::Penalty,
    pub risk_free: f64,
    pub bank: &'a cga_core::SolutionBank,
    pub offered: usize,
    pub agents: Vec<AgentSummary>,
    pub trace: &'a AnnealingTrace,
    pub epochs: usize,
}

pub fn build_report(inp: ReportInputs<'_>) -> Result<RunReport> {
    let raw = inp.trace.best_x.clone();
    let weights = project_simplex_box(&raw);
    let (bank_minimum_entry, bank_minimum) = inp
        .bank
        .entries()
        .iter()
        .map(|e| inp.penalty.value(&e.x, inp.est))
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, f)| if f < best.1 { (i, f) } else { best });
    Ok(RunReport {
        assets: inp.assets.to_vec(),
        sectors: inp.sectors.to_vec(),
        weights_by_sector: sector_weights(inp.sectors, &weights),
        portfolio: PortfolioStats::of(&weights, inp.est, inp.risk_free)?,
        objective: ObjectiveSummary {
            penalty: inp.penalty.params,
            mode: inp.penalty.mode,
            bank_minimum,
            bank_minimum_entry,
            annealed: inp.trace.best_objective,
            projected: inp.penalty.value(&weights, inp.est),
        },
        bank: BankSummary { entries: inp.bank.len(), offered: inp.offered, duplicates_dropped: inp.bank.duplicates_dropped() },
        inclinations: inp.bank.inclinations(),
        agents: inp.agents,
        anneal: AnnealSummary {
            trials: inp.trace.records.len(),
            epochs: inp.epochs,
            accepted: inp.trace.records.iter().filter(|r| r.accepted).count(),
            initial_entry: inp.trace.initial_entry,
            trace_file: TRACE_CSV.into(),
        },
        raw_weights: raw,
        weights,
    })
}

fn failure(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() }
}

fn write_csv(path: &Path, rows: impl FnOnce(&mut csv::Writer<fs::File>) -> csv::Result<()>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    rows(&mut w).map_err(csv_error(path))?;
    w.flush().map_err(failure(path))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
    fs::write(path, json + "\n").map_err(failure(path))
}

pub fn write_trace(trace: &AnnealingTrace, path: &Path) -> Result<()> {
    write_csv(path, |w| {
        w.write_record(["trial", "temperature", "nearest_entry", "accepted", "objective", "best_objective"])?;
        for r in &trace.records {
            w.write_record([
                r.trial.to_string(),
                r.temperature.to_string(),
                r.nearest_entry.to_string(),
                r.accepted.to_string(),
                r.objective.to_string(),
                r.best_objective.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Writes the four plot-ready CSV files and returns their paths.
pub fn emit_plots(report: &RunReport, est: &MarketEstimates, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if report.assets.len() != est.n {
        return Err(cga_core::Error::DimensionMismatch { expected: est.n, found: report.assets.len() }.into());
    }
    fs::create_dir_all(out_dir).map_err(failure(out_dir))?;
    let paths: Vec<PathBuf> =
        [RISK_RETURN_CSV, CORRELATION_CSV, INCLINATIONS_CSV, WEIGHTS_BY_SECTOR_CSV].iter().map(|f| out_dir.join(f)).collect();

    write_csv(&paths[0], |w| {
        w.write_record(["asset", "return", "risk"])?;
        for (i, a) in report.assets.iter().enumerate() {
            w.write_record([a.clone(), est.r[i].to_string(), est.s[i].to_string()])?;
        }
        Ok(())
    })?;
    write_csv(&paths[1], |w| {
        let mut header = vec!["asset".to_string()];
        header.extend(report.assets.iter().cloned());
        w.write_record(&header)?;
        for (i, a) in report.assets.iter().enumerate() {
            let mut row = vec![a.clone()];
            row.extend((0..est.n).map(|j| est.corr[(i, j)].to_string()));
            w.write_record(&row)?;
        }
        Ok(())
    })?;
    write_csv(&paths[2], |w| {
        w.write_record(["agent_id", "params", "hits"])?;
        for inc in &report.inclinations {
            w.write_record([inc.agent_id.clone(), inc.params.clone(), inc.hits.to_string()])?;
        }
        Ok(())
    })?;
    write_csv(&paths[3], |w| {
        w.write_record(["sector", "weight", "raw_weight"])?;
        let raw = sector_weights(&report.sectors, &report.raw_weights);
        for (s, r) in report.weights_by_sector.iter().zip(&raw) {
            w.write_record([s.sector.clone(), s.weight.to_string(), r.weight.to_string()])?;
        }
        Ok(())
    })?;
    Ok(paths)
}
