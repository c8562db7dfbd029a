//! The end-to-end run: ingest, estimate, agents, anneal, report.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cga_core::anneal::{anneal, temperature_schedule, AnnealingTrace};
use cga_core::market::estimate;
use cga_core::{MarketEstimates, SolutionBank};

use crate::agents::{run_agents, AgentsOutcome, Penalty};
use crate::bankio::save_bank;
use crate::config::RunConfig;
use crate::error::{Error, Result, Stage, StageExt};
use crate::prices::{compute_returns, load_prices, synth_scenario, write_prices, write_sectors, PriceSeries};
use crate::report::{build_report, emit_plots, write_json, write_trace, ReportInputs, RunReport, TRACE_CSV};

pub const REPORT_JSON: &str = "report.json";
pub const BANK_JSON: &str = "bank.json";

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub parallel: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(seed) = self.seed {
            cfg.override_seed(seed);
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub estimates: MarketEstimates,
    pub bank: SolutionBank,
    pub trace: AnnealingTrace,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Price series named by the config, either read from disk or generated.
pub fn ingest(cfg: &RunConfig) -> Result<Vec<PriceSeries>> {
    match (&cfg.data.prices, &cfg.data.synth) {
        (Some(p), _) => load_prices(p, cfg.data.sectors.as_deref()),
        (None, Some(s)) => synth_scenario(s.kind, s.n, s.periods, s.seed),
        (None, None) => Err(Error::Config("data: one of `prices` or `synth` is required".into())),
    }
}

pub fn estimates_from(cfg: &RunConfig, series: &[PriceSeries]) -> Result<MarketEstimates> {
    Ok(estimate(&compute_returns(series, cfg.data.returns)?)?)
}

pub fn anneal_bank(est: &MarketEstimates, bank: &mut SolutionBank, penalty: &Penalty, cfg: &RunConfig) -> Result<AnnealingTrace> {
    let (_, trace) = anneal(|x| penalty.value(x, est), bank, &cfg.sa)?;
    Ok(trace)
}

fn timed<T>(stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().stage(stage);
    log::info!("{stage} stage finished in {:.2?}", start.elapsed());
    out
}

pub fn run_pipeline(config_path: &Path, overrides: &Overrides) -> Result<PipelineOutput> {
    let mut cfg = RunConfig::load(config_path)?;
    overrides.apply(&mut cfg);
    run_config(&cfg, overrides.parallel)
}

pub fn run_config(cfg: &RunConfig, parallel: bool) -> Result<PipelineOutput> {
    cfg.validate()?;
    let out_dir = cfg.output_dir.clone();
    let series = timed(Stage::Ingest, || {
        let series = ingest(cfg)?;
        fs::create_dir_all(&out_dir).map_err(Error::io(&out_dir))?;
        if cfg.data.synth.is_some() {
            write_prices(&out_dir.join("prices.csv"), &series)?;
            write_sectors(&out_dir.join("sectors.csv"), &series)?;
        }
        Ok(series)
    })?;
    let est = timed(Stage::Estimate, || estimates_from(cfg, &series))?;
    let penalty = Penalty { params: cfg.penalty.resolve(&est)?, mode: cfg.penalty.mode };
    let AgentsOutcome { mut bank, summaries, offered } =
        timed(Stage::Agents, || run_agents(&est, &cfg.agents, &penalty, parallel))?;
    let trace = timed(Stage::Anneal, || anneal_bank(&est, &mut bank, &penalty, cfg))?;

    let assets: Vec<String> = series.iter().map(|s| s.asset_id.clone()).collect();
    let sectors: Vec<String> = series.iter().map(|s| s.sector.clone()).collect();
    let (report, files) = timed(Stage::Report, || {
        let report = build_report(ReportInputs {
            assets: &assets,
            sectors: &sectors,
            est: &est,
            penalty,
            risk_free: cfg.risk_free,
            bank: &bank,
            offered,
            agents: summaries,
            trace: &trace,
            epochs: temperature_schedule(&cfg.sa).len(),
        })?;
        let mut files = vec![out_dir.join(REPORT_JSON), out_dir.join(TRACE_CSV), out_dir.join(BANK_JSON)];
        write_json(&report, &files[0])?;
        write_trace(&trace, &files[1])?;
        save_bank(&bank, &files[2])?;
        files.extend(emit_plots(&report, &est, &out_dir)?);
        Ok((report, files))
    })?;
    Ok(PipelineOutput { report, estimates: est, bank, trace, out_dir, files })
}
