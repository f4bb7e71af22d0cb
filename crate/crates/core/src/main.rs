use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use rdbench::workbench::{persist, run_experiment, ExperimentConfig, ExperimentKind, RunContext};
use rdbench::Error;

#[derive(Parser)]
#[command(
    name = "rdbench",
    version,
    about = "Cayley-ball experiments on relative hyperbolicity and Rapid Decay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by the config, whatever its kind.
    Run(Common),
    /// Enumerate a ball and report sphere sizes.
    Ball(Common),
    /// Check the triangle condition for fixed (σ, δ).
    StarVerify(Common),
    /// Search for the least passing (σ, δ).
    Calibrate(Common),
    /// Count central decompositions and fit a linear envelope.
    DecompCount(Common),
    /// Estimate sphere-restricted convolution constants.
    RdProfile(Common),
    /// Lower bounds for convolution operator norms.
    Opnorm(Common),
    /// Check a triangle-center map exhaustively.
    TmapVerify(Common),
    /// Evaluate every inequality of the decay estimate on sampled inputs.
    Trace(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for reports; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Ball cache directory.
    #[arg(long, env = "RDBENCH_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Root seed; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (Option<ExperimentKind>, Common) {
        match self {
            Command::Run(c) => (None, c),
            Command::Ball(c) => (Some(ExperimentKind::Ball), c),
            Command::StarVerify(c) => (Some(ExperimentKind::StarVerify), c),
            Command::Calibrate(c) => (Some(ExperimentKind::Calibrate), c),
            Command::DecompCount(c) => (Some(ExperimentKind::DecompCount), c),
            Command::RdProfile(c) => (Some(ExperimentKind::RdProfile), c),
            Command::Opnorm(c) => (Some(ExperimentKind::Opnorm), c),
            Command::TmapVerify(c) => (Some(ExperimentKind::TmapVerify), c),
            Command::Trace(c) => (Some(ExperimentKind::Trace), c),
        }
    }
}

fn execute(kind: Option<ExperimentKind>, args: Common) -> Result<i32, Error> {
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(Error::config("--workers", "must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("--workers", e.to_string()))?;
    }
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::from_toml(&text, kind)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    let ctx = RunContext {
        cache_dir: args.cache_dir,
    };
    let start = Instant::now();
    let report = run_experiment(&cfg, &ctx)?;
    let written = persist(&report, &cfg.output.dir)?;
    eprintln!("{} finished in {:.2?}", cfg.kind.name(), start.elapsed());
    let status = if report.exit_code() == 0 { "pass" } else { "fail" };
    println!("{}: {status}", cfg.kind.name());
    for p in written {
        println!("  wrote {}", p.display());
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let code = match execute(kind, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rdbench: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
