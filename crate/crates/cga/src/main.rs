use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cga::agents::{run_agents, Penalty};
use cga::bankio::{load_bank_for, save_bank};
use cga::cga_core::acor::{aco_minimize, AcoConfig};
use cga::cga_core::anneal::{anneal, AnnealingConfig};
use cga::cga_core::bench::{suite, BenchFunction};
use cga::cga_core::market::ScenarioKind;
use cga::cga_core::{AgentClass, BankEntry, SolutionBank};
use cga::config::RunConfig;
use cga::pipeline::{anneal_bank, estimates_from, ingest, run_pipeline, Overrides, BANK_JSON};
use cga::prices::{synth_scenario, write_prices, write_sectors};
use cga::report::{emit_plots, write_json, write_trace, RunReport, TRACE_CSV};
use cga::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cga", version, about = "Solver agents, solution bank and a bank-guided annealer for long-only portfolios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Replaces every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the configuration's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        Overrides { seed: self.seed, out: self.out.clone(), parallel: false }.apply(&mut cfg);
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Bearish,
    Bullish,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic price and sector file pair.
    Synth {
        #[arg(long, value_enum)]
        kind: Scenario,
        #[arg(long, default_value_t = 29)]
        n: usize,
        /// Closes per asset.
        #[arg(long, default_value_t = 250)]
        periods: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write mean returns, volatilities, covariance and correlation for the configured data.
    Estimate(Common),
    /// Run the agent roster and save the solution bank.
    Agents {
        #[command(flatten)]
        common: Common,
        /// Run agents on separate threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Anneal against a saved bank.
    Anneal {
        #[command(flatten)]
        common: Common,
        /// Bank file; defaults to bank.json in the output directory.
        #[arg(long)]
        bank: Option<PathBuf>,
    },
    /// Full pipeline: ingest, estimate, agents, anneal, report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        parallel: bool,
    },
    /// Run ACO-R and the annealer on the benchmark suite.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional CSV destination for the results table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the plot CSV files from a saved report.
    Plots {
        #[command(flatten)]
        common: Common,
        /// Report file; defaults to report.json in the output directory.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn penalty_for(cfg: &RunConfig, est: &cga::cga_core::MarketEstimates) -> Result<Penalty> {
    Ok(Penalty { params: cfg.penalty.resolve(est)?, mode: cfg.penalty.mode })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::IoFailure { path: dir.to_path_buf(), reason: e.to_string() })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth { kind, n, periods, seed, out } => {
            let kind = match kind {
                Scenario::Bearish => ScenarioKind::Bearish,
                Scenario::Bullish => ScenarioKind::Bullish,
            };
            let series = synth_scenario(kind, n, periods, seed)?;
            ensure_dir(&out)?;
            write_prices(&out.join("prices.csv"), &series)?;
            write_sectors(&out.join("sectors.csv"), &series)?;
            println!("wrote {} assets x {periods} closes to {}", n, out.display());
        }
        Command::Estimate(common) => {
            let cfg = common.load()?;
            let est = estimates_from(&cfg, &ingest(&cfg)?)?;
            ensure_dir(&cfg.output_dir)?;
            let path = cfg.output_dir.join("estimates.json");
            write_json(&est, &path)?;
            println!("wrote {}", path.display());
        }
        Command::Agents { common, parallel } => {
            let cfg = common.load()?;
            let est = estimates_from(&cfg, &ingest(&cfg)?)?;
            let outcome = run_agents(&est, &cfg.agents, &penalty_for(&cfg, &est)?, parallel)?;
            ensure_dir(&cfg.output_dir)?;
            save_bank(&outcome.bank, &cfg.output_dir.join(BANK_JSON))?;
            write_json(&outcome.summaries, &cfg.output_dir.join("agents.json"))?;
            for s in &outcome.summaries {
                println!("{:<4} {:<17} solutions={:<3} added={:<3} {}", s.id, format!("{:?}", s.kind), s.solutions, s.added, s.error.as_deref().unwrap_or(""));
            }
            println!("bank: {} entries ({} duplicates dropped)", outcome.bank.len(), outcome.bank.duplicates_dropped());
        }
        Command::Anneal { common, bank } => {
            let cfg = common.load()?;
            let est = estimates_from(&cfg, &ingest(&cfg)?)?;
            let bank_path = bank.unwrap_or_else(|| cfg.output_dir.join(BANK_JSON));
            let mut bank = load_bank_for(&bank_path, est.n)?;
            bank.reset_hits();
            let trace = anneal_bank(&est, &mut bank, &penalty_for(&cfg, &est)?, &cfg)?;
            ensure_dir(&cfg.output_dir)?;
            write_trace(&trace, &cfg.output_dir.join(TRACE_CSV))?;
            write_json(&trace.best_x, &cfg.output_dir.join("anneal_weights.json"))?;
            save_bank(&bank, &bank_path)?;
            println!("trials={} start_entry={} start={:.6e} best={:.6e}", trace.records.len(), trace.initial_entry, trace.initial_objective, trace.best_objective);
        }
        Command::Run { common, parallel } => {
            let out = run_pipeline(&common.config, &Overrides { seed: common.seed, out: common.out, parallel })?;
            let r = &out.report;
            println!("bank entries: {} (offered {}, duplicates {})", r.bank.entries, r.bank.offered, r.bank.duplicates_dropped);
            println!("objective: bank minimum {:.6e}, annealed {:.6e}", r.objective.bank_minimum, r.objective.annealed);
            println!(
                "portfolio: return {:.6e} volatility {:.6e} sharpe {}",
                r.portfolio.ret,
                r.portfolio.volatility,
                r.portfolio.sharpe.map_or("n/a".to_string(), |s| format!("{s:.4}"))
            );
            for s in &r.weights_by_sector {
                println!("  {:<14} {:.4}", s.sector, s.weight);
            }
            println!("outputs in {}", out.out_dir.display());
        }
        Command::Bench { seed, out } => bench(seed, out.as_deref())?,
        Command::Plots { common, report } => {
            let cfg = common.load()?;
            let est = estimates_from(&cfg, &ingest(&cfg)?)?;
            let path = report.unwrap_or_else(|| cfg.output_dir.join(cga::pipeline::REPORT_JSON));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::IoFailure { path: path.clone(), reason: e.to_string() })?;
            let report: RunReport =
                serde_json::from_str(&text).map_err(|e| Error::SchemaMismatch { path: path.clone(), reason: e.to_string() })?;
            for p in emit_plots(&report, &est, &cfg.output_dir)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchRow {
    function: &'static str,
    dim: usize,
    optimizer: &'static str,
    best: f64,
    global_minimum: f64,
    evaluations: usize,
}

fn bench(seed: u64, out: Option<&Path>) -> Result<()> {
    let mut rows = Vec::new();
    for f in suite() {
        let aco = aco_minimize(|x| f.value(x), &f.bounds, &AcoConfig { seed, max_iters: 5000, ..Default::default() })?;
        rows.push(BenchRow {
            function: f.name(),
            dim: f.dim,
            optimizer: "aco_r",
            best: aco.solutions[0].1,
            global_minimum: f.global_minimum().1,
            evaluations: aco.evaluations,
        });
        let (best, evaluations) = bench_anneal(&f, seed, None)?;
        rows.push(BenchRow { function: f.name(), dim: f.dim, optimizer: "sa", best, global_minimum: f.global_minimum().1, evaluations });
        let (best, evaluations) = bench_anneal(&f, seed, Some(&aco.solutions))?;
        rows.push(BenchRow {
            function: f.name(),
            dim: f.dim,
            optimizer: "aco_sa",
            best,
            global_minimum: f.global_minimum().1,
            evaluations: evaluations + aco.evaluations,
        });
    }
    println!("{:<11} {:>3}  {:<6} {:>14} {:>8}", "function", "dim", "method", "best", "evals");
    for r in &rows {
        println!("{:<11} {:>3}  {:<6} {:>14.6e} {:>8}", r.function, r.dim, r.optimizer, r.best, r.evaluations);
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
        for r in &rows {
            w.serialize(r).map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
        }
        w.flush().map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
    }
    Ok(())
}

/// Annealing on the unit cube, guided either by ten uniform random points or
/// by the solutions of an ACO-R run.
fn bench_anneal(f: &BenchFunction, seed: u64, guide: Option<&[(Vec<f64>, f64)]>) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bank = SolutionBank::new(f.dim);
    match guide {
        Some(solutions) => {
            for (i, (x, v)) in solutions.iter().enumerate() {
                bank.add(BankEntry::new(f.to_unit(x), format!("ACO{i}"), AgentClass::Stochastic, *v))?;
            }
        }
        None => {
            for i in 0..10 {
                let u: Vec<f64> = (0..f.dim).map(|_| rng.random::<f64>()).collect();
                let v = f.value(&f.from_unit(&u));
                bank.add(BankEntry::new(u, format!("R{i}"), AgentClass::Stochastic, v))?;
            }
        }
    }
    let cfg = AnnealingConfig { seed, noise_scale: 0.2, ..Default::default() };
    let (_, trace) = anneal(|u| f.value(&f.from_unit(u)), &mut bank, &cfg)?;
    Ok((trace.best_objective, trace.records.len() + bank.len()))
}
