use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bspir_core::harness::default_ceiling;
use bspir_core::{
    emit_report, run_golden, run_trials, to_canonical_json, verify_privacy, Mode, Mutation, OracleReport, PirParams,
    RunConfig, StrategyChoice,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "bspir", version, about = "Byzantine-robust symmetric PIR simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seeded end-to-end retrievals against the adversary zoo.
    Simulate(RunArgs),
    /// Exhaustive privacy, security and correctness checks on a small instance.
    VerifyPrivacy(RunArgs),
    /// Regression against the worked nine-server example.
    Golden(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Number of servers.
    #[arg(long)]
    n: Option<usize>,
    /// Byzantine bound.
    #[arg(long)]
    b: Option<usize>,
    /// Number of messages.
    #[arg(long)]
    k: Option<usize>,
    /// Field modulus (default: smallest prime >= N + L).
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Strategy name, or `all`.
    #[arg(long)]
    strategy: Option<StrategyChoice>,
    /// Byzantine servers, 1-based, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    byz_set: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Stop decoding at the first consistent candidate.
    #[arg(long)]
    fast: bool,
    /// Server evaluation points, e.g. `1,2,3,4,5,6,7,8,9`.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<u64>>,
    /// Message evaluation points.
    #[arg(long, value_delimiter = ',')]
    fs: Option<Vec<u64>>,
    /// Remove one ingredient before verifying: none, no_mask, no_query_noise, no_storage_noise.
    #[arg(long, value_parser = parse_mutation)]
    mutation: Option<Mutation>,
    /// Worker threads (default: all cores). Reports do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| {
        format!("unknown mutation `{s}`; expected none, no_mask, no_query_noise or no_storage_noise")
    })
}

impl RunArgs {
    fn resolve(&self, mode: Mode) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => mode_defaults(mode),
        };
        config.mode = mode;
        if let Some(v) = self.n {
            config.n = v;
        }
        if let Some(v) = self.b {
            config.b = v;
        }
        if let Some(v) = self.k {
            config.k = v;
        }
        if self.q.is_some() {
            config.q = self.q;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.strategy {
            config.strategy = v;
        }
        if self.byz_set.is_some() {
            config.byz_set = self.byz_set.clone();
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if self.alphas.is_some() {
            config.alphas = self.alphas.clone();
        }
        if self.fs.is_some() {
            config.fs = self.fs.clone();
        }
        if let Some(v) = self.mutation {
            config.mutation = v;
        }
        config.fast |= self.fast;
        config.coalition()?;
        Ok(config)
    }
}

fn mode_defaults(mode: Mode) -> RunConfig {
    match mode {
        Mode::VerifyPrivacy => RunConfig {
            n: 5,
            b: 1,
            k: 2,
            ..RunConfig::default()
        },
        Mode::Golden => RunConfig {
            n: 9,
            b: 2,
            k: 1,
            q: Some(11),
            ..RunConfig::default()
        },
        Mode::Simulate => RunConfig::default(),
    }
}

#[derive(Serialize)]
struct PrivacyRecord {
    passed: bool,
    params: PirParams,
    mutation: Mutation,
    reports: Vec<OracleReport>,
}

fn execute(mode: Mode, args: &RunArgs) -> Result<bool> {
    let config = args.resolve(mode)?;
    let output = args.output.as_deref();
    match mode {
        Mode::Simulate => {
            let report = run_trials(&config)?;
            write(&report, output)?;
            Ok(report.all_succeeded())
        }
        Mode::VerifyPrivacy => {
            let reports = verify_privacy(&config, default_ceiling())?;
            let record = PrivacyRecord {
                passed: reports.iter().all(OracleReport::passed),
                params: config.params()?,
                mutation: config.mutation,
                reports,
            };
            write(&record, output)?;
            Ok(record.passed)
        }
        Mode::Golden => {
            if (config.n, config.b, config.k, config.q) != (9, 2, 1, Some(11)) {
                bail!("golden runs only on N = 9, B = 2, K = 1, q = 11; override points with --alphas / --fs");
            }
            let record = run_golden(config.alphas.clone(), config.fs.clone())?;
            write(&record, output)?;
            Ok(record.passed)
        }
    }
}

fn write<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => emit_report(value, path)?,
        None => std::io::stdout().write_all(to_canonical_json(value)?.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::VerifyPrivacy(a) => (Mode::VerifyPrivacy, a),
        Command::Golden(a) => (Mode::Golden, a),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        pool = pool.num_threads(t);
    }
    let result = pool
        .build()
        .context("building thread pool")
        .and_then(|pool| pool.install(|| execute(mode, args)));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
