use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand};
use dirac_harmonic::config::RunConfig;
use dirac_harmonic::report::{self, ExitCode, Outcome};
use dirac_harmonic::spectral::DEFAULT_GAP;
use dirac_harmonic::{Error, Result};

/// Dirac-harmonic pairs between spheres: construction, verification,
/// zero census and kernel search.
#[derive(Parser)]
#[command(name = "dhm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sets both grid dimensions to N.
    #[arg(long, value_name = "N")]
    grid_override: Option<usize>,
    /// Overrides the configured seed.
    #[arg(long, value_name = "K")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pair and check pole admissibility.
    Construct(RunArgs),
    /// Evaluate residual, Bochner, twistor and energy gates.
    Verify(RunArgs),
    /// Count zeros of each slot and compare with the predicted totals.
    Census(RunArgs),
    /// Near-kernel of the Dirac operator for φ = z^d between round spheres.
    Kernel {
        #[arg(long)]
        degree: u32,
        /// Grid size per dimension.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_GAP)]
        gap: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Same as --grid.
        #[arg(long, value_name = "N")]
        grid_override: Option<usize>,
    },
    /// Joint residual descent; the trace is written next to the report.
    Search(RunArgs),
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(n) = args.grid_override {
        cfg.override_grid(n)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn trace_path(out: &Path) -> PathBuf {
    out.with_extension("trace.csv")
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, &outcome.report)?;
            if let Some(trace) = &outcome.trace {
                fs::write(trace_path(path), trace)?;
            }
        }
        None => print!("{}", outcome.report),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (outcome, out) = match cli.command {
        Command::Construct(a) => (report::run_construct(&load(&a)?)?, a.out),
        Command::Verify(a) => (report::run_verify(&load(&a)?)?, a.out),
        Command::Census(a) => (report::run_census(&load(&a)?)?, a.out),
        Command::Search(a) => (report::run_search(&load(&a)?)?, a.out),
        Command::Kernel {
            degree,
            grid,
            gap,
            out,
            grid_override,
        } => (report::run_kernel(degree, grid_override.unwrap_or(grid), gap)?, out),
    };
    emit(&outcome, out.as_deref())?;
    Ok(outcome.code)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dhm: {e}");
            if let Error::Inadmissible(r) = &e {
                if let Ok(s) = serde_json::to_string(r) {
                    eprintln!("{s}");
                }
            }
            ExitCode::for_error(&e)
        }
    };
    process::exit(code.code());
}
