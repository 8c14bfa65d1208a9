use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlevp::harness::{run, write_outputs, ExperimentConfig, HarnessError, Mode};

/// Contour-integral and Chebyshev solvers for nonlinear eigenvalue problems.
#[derive(Parser)]
#[command(name = "nlevp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the eigenvalues inside the configured domain.
    Solve(Common),
    /// Tabulate approximation error against the order m.
    Sweep(Common),
    /// Solve, then compare with the reference oracle of the problem.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Overrides `solver.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.report`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppresses the summary on standard error.
    #[arg(long)]
    quiet: bool,
}

fn configure_threads() -> Result<(), HarnessError> {
    let Ok(value) = std::env::var("NLEVP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| HarnessError::Config(format!("NLEVP_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| HarnessError::Config(format!("cannot size the thread pool: {e}")))
}

fn execute(mode: Mode, args: Common) -> Result<i32, HarnessError> {
    configure_threads()?;
    let mut config = ExperimentConfig::load(&args.config)?;
    config.mode = mode;
    if let Some(seed) = args.seed {
        config.solver.seed = seed;
    }
    if let Some(out) = args.out {
        config.output.report = Some(out);
    }
    let report = run(&config)?;
    let stdout = write_outputs(&report)?;
    print!("{stdout}");
    if !args.quiet {
        eprint!("nlevp {}: {}", mode.as_str(), report.status.as_str());
        if let Some(s) = &report.solve {
            eprint!(
                ", {} eigenvalue(s) after {} outer iteration(s)",
                s.pairs.len(),
                s.outer_iterations
            );
        }
        if let Some(o) = &report.oracle {
            eprint!(", oracle found {}", o.eigenvalues.len());
            if let Some(d) = o.max_abs_diff {
                eprint!(", max |λ − λ_oracle| = {d:.3e}");
            }
        }
        eprintln!();
        if let Some(msg) = &report.message {
            eprintln!("  {msg}");
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Solve(a) => (Mode::Solve, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Oracle(a) => (Mode::Oracle, a),
    };
    let code = match execute(mode, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
