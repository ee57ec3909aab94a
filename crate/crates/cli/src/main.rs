//! `burgers`: configuration-driven experiment runner over the solver
//! library. Each subcommand reads one JSON config, writes CSV/JSON
//! artifacts plus a manifest into the output directory, and exits 0 on
//! success, 1 on configuration or I/O problems, and 2 when the math
//! honestly failed to converge (so parameter scans can tell crashes
//! from non-detections).

mod config;
mod output;

use burgers_core::asymptotics::rational_period;
use burgers_core::entropy::{entropy_step, extract_graph, godunov_evolve, graph_inclusion_check};
use burgers_core::{corollary_check, detect_asymptotic_period, estimate_alpha, estimate_rho};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use output::{cell, Artifacts};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "burgers", version, about = "Forced Burgers entropy-solution experiments")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parameter-grid subcommands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Iterate the one-period entropy operator and dump a snapshot CSV
    /// per period.
    Evolve,
    /// Effective Hamiltonian and rotation number over the configured
    /// c-grid.
    AlphaCurve,
    /// Detect the asymptotic period and write the full JSON report.
    Period,
    /// Dump graph polylines and characteristic-inclusion defects per
    /// period.
    Graphs,
    /// L1 gap between the DP evolution and the Godunov oracle across
    /// space resolutions.
    OracleCompare,
    /// Shock-count and limit-distance diagnostics at selected periods.
    Corollary,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::AlphaCurve => "alpha-curve",
            Command::Period => "period",
            Command::Graphs => "graphs",
            Command::OracleCompare => "oracle-compare",
            Command::Corollary => "corollary",
        }
    }
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<burgers_core::Error> for Failure {
    fn from(e: burgers_core::Error) -> Self {
        use burgers_core::Error::*;
        let code = match e {
            NoConvergence { .. } | NoPeriodDetected { .. } | NotConverged { .. } => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config_path =
        cli.config.as_ref().ok_or_else(|| Failure::config("--config <path> is required"))?;
    let out_dir = cli.out.clone().ok_or_else(|| Failure::config("--out <dir> is required"))?;
    let bytes = std::fs::read(config_path).map_err(|e| {
        Failure::config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let cfg: ExperimentConfig = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::config(format!("config {}: {e}", config_path.display())))?;
    cfg.validate()?;
    let seed = cli.seed.unwrap_or(cfg.experiment.seed);
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::config("--jobs must be positive"));
        }
        // Errors only on double initialization, which cannot happen in
        // this single-run binary.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let art = Artifacts::new(out_dir, cli.command.name(), &bytes, seed)?;
    match cli.command {
        Command::Evolve => evolve(&cfg, seed, art),
        Command::AlphaCurve => alpha_curve(&cfg, art),
        Command::Period => period(&cfg, seed, art),
        Command::Graphs => graphs(&cfg, seed, art),
        Command::OracleCompare => oracle_compare(&cfg, seed, art),
        Command::Corollary => corollary(&cfg, seed, art),
    }
}

fn snapshot_name(k: usize) -> String {
    format!("snapshot_{k:04}.csv")
}

fn evolve(cfg: &ExperimentConfig, seed: u64, mut art: Artifacts) -> Result<(), Failure> {
    let mut y = cfg.initial_state(seed);
    let lax = cfg.lax(y.mean())?;
    art.grid_csv(&snapshot_name(0), &y)?;
    let mut series = Vec::with_capacity(cfg.experiment.n_periods);
    for k in 1..=cfg.experiment.n_periods {
        let next = entropy_step(&cfg.spec, &lax, &y)?;
        let step = next.l1_distance(&y)?;
        art.grid_csv(&snapshot_name(k), &next)?;
        series.push(vec![k.to_string(), cell(step), cell(next.mean())]);
        y = next;
    }
    art.csv("series.csv", "period,l1_step,mean", series)?;
    Ok(art.finish()?)
}

fn alpha_curve(cfg: &ExperimentConfig, mut art: Artifacts) -> Result<(), Failure> {
    let e = &cfg.experiment;
    if e.c_grid.is_empty() {
        return Err(Failure::config("alpha-curve needs a non-empty experiment.c_grid"));
    }
    let alpha_periods = e.n_periods.max(16);
    let rho_periods = e.n_periods.max(32);
    let rows: Result<Vec<Vec<String>>, burgers_core::Error> = e
        .c_grid
        .par_iter()
        .map(|&c| {
            let lax = cfg.lax(c)?;
            let est = estimate_alpha(&cfg.spec, &lax, c, alpha_periods, e.alpha_stderr_bound)?;
            let rho = estimate_rho(&cfg.spec, &lax, c, rho_periods)?;
            let t = rational_period(rho, 12, 2e-3);
            Ok(vec![cell(c), cell(est.alpha), cell(est.stderr), cell(rho), t.to_string()])
        })
        .collect();
    art.csv("alpha_curve.csv", "c,alpha,alpha_stderr,rho,T", rows?)?;
    Ok(art.finish()?)
}

fn period(cfg: &ExperimentConfig, seed: u64, mut art: Artifacts) -> Result<(), Failure> {
    let y0 = cfg.initial_state(seed);
    let lax = cfg.lax(y0.mean())?;
    let horizon = cfg.experiment.n_periods.max(32);
    let report = detect_asymptotic_period(&cfg.spec, &lax, &y0, horizon, cfg.experiment.tolerance)?;
    art.json("report.json", &report)?;
    Ok(art.finish()?)
}

fn graphs(cfg: &ExperimentConfig, seed: u64, mut art: Artifacts) -> Result<(), Failure> {
    let mut y = cfg.initial_state(seed);
    let lax = cfg.lax(y.mean())?;
    art.graph_csv("graph_0000.csv", &extract_graph(&y))?;
    let mut defects = Vec::with_capacity(cfg.experiment.n_periods);
    for k in 1..=cfg.experiment.n_periods {
        let next = entropy_step(&cfg.spec, &lax, &y)?;
        let defect = graph_inclusion_check(&cfg.spec, &y, &next, cfg.experiment.dt_flow)?;
        art.graph_csv(&format!("graph_{k:04}.csv"), &extract_graph(&next))?;
        defects.push(vec![k.to_string(), cell(defect)]);
        y = next;
    }
    art.csv("defects.csv", "period,inclusion_defect", defects)?;
    Ok(art.finish()?)
}

fn oracle_compare(cfg: &ExperimentConfig, seed: u64, mut art: Artifacts) -> Result<(), Failure> {
    let e = &cfg.experiment;
    if e.n_grid.is_empty() {
        return Err(Failure::config("oracle-compare needs a non-empty experiment.n_grid"));
    }
    let rows: Result<Vec<Vec<String>>, burgers_core::Error> = e
        .n_grid
        .par_iter()
        .map(|&n| {
            let y0 = cfg.initial.realize(n, seed);
            let lax = cfg.lax_at(n, y0.mean())?;
            let dp = entropy_step(&cfg.spec, &lax, &y0)?;
            let fv = godunov_evolve(&cfg.spec, &y0, 0.0, 1.0)?;
            let gap = dp.l1_distance(&fv)?;
            Ok(vec![n.to_string(), cell(gap)])
        })
        .collect();
    art.csv("oracle_compare.csv", "n,l1_gap", rows?)?;
    Ok(art.finish()?)
}

fn corollary(cfg: &ExperimentConfig, seed: u64, mut art: Artifacts) -> Result<(), Failure> {
    let y0 = cfg.initial_state(seed);
    let lax = cfg.lax(y0.mean())?;
    let report =
        corollary_check(&cfg.spec, &lax, &y0, &cfg.experiment.periods, cfg.experiment.tolerance)?;
    art.json("corollary.json", &report)?;
    Ok(art.finish()?)
}
