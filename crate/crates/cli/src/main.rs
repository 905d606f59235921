//! `cavlab`: runs experiments from flat JSON configs and the acceptance
//! battery.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use cavlab::battery::{self, ACCEPTANCE_SEED, CRITERIA};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::Config;

#[derive(Parser)]
#[command(name = "cavlab", version, about = "Random graph optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for relative output paths.
        #[arg(long, env = "CAVLAB_OUT")]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Reduction solvers against exhaustive search on small random graphs.
    OracleSuite {
        #[arg(long, default_value_t = ACCEPTANCE_SEED)]
        seed: u64,
    },
    /// The full acceptance battery, one line per criterion.
    Acceptance {
        #[arg(long, default_value_t = ACCEPTANCE_SEED)]
        seed: u64,
        /// Comma-separated criterion numbers to run instead of all.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a Config,
    version: &'static str,
    wall_time_s: f64,
    outputs: Vec<String>,
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn run(config_path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut config = Config::load(config_path)?;
    if seed.is_some() {
        config.master_seed = seed;
    }
    let plan = config.plan(&base_dir(config_path))?;
    let out_dir = out.unwrap_or_else(|| PathBuf::from("."));
    let output = match &config.output {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => out_dir.join(p),
        None => out_dir.join(format!("{}.csv", config.experiment.tag())),
    };
    if let Some(w) = config.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("starting worker pool")?;
    }
    let start = Instant::now();
    let tables = run::execute(&plan)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut outputs = Vec::new();
    for t in &tables {
        let path = with_suffix(&output, t.suffix);
        std::fs::write(&path, &t.csv).with_context(|| format!("writing {}", path.display()))?;
        outputs.push(path.display().to_string());
    }
    let sidecar = Sidecar { config: &config, version: env!("CARGO_PKG_VERSION"), wall_time_s, outputs };
    let json_path = output.with_extension("json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)? + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;
    println!("wrote {}", sidecar.outputs.join(", "));
    Ok(())
}

fn acceptance(seed: u64, only: &[usize]) -> Result<bool> {
    let mut all = true;
    for &(id, _) in &CRITERIA {
        if only.is_empty() || only.contains(&id) {
            let r = battery::run_criterion(id, seed)?;
            println!("{}", r.line());
            all &= r.pass;
        }
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, seed, out } => run(&config, seed, out).map(|_| true),
        Command::Validate { config } => Config::load(&config).and_then(|c| c.plan(&base_dir(&config))).map(|_| {
            println!("ok");
            true
        }),
        Command::OracleSuite { seed } => acceptance(seed, &[1]),
        Command::Acceptance { seed, only } => acceptance(seed, &only),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
