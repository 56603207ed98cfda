use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use horosurf::cli::{cmd_flow, cmd_surface, cmd_verify, cmd_weingarten, emit, CliError};
use horosurf::config::{Config, Tolerances};

/// Surfaces in hyperbolic 3-space as envelopes of horospheres.
#[derive(Parser)]
#[command(name = "horosurf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Envelope meshes of a field, one per offset.
    Surface {
        #[arg(long)]
        config: PathBuf,
    },
    /// Parallel-flow curvature paths, focal events and invariants.
    Flow {
        #[arg(long)]
        config: PathBuf,
    },
    /// Weingarten surfaces of a conformal map, classification and curvature lines.
    Weingarten {
        #[arg(long)]
        config: PathBuf,
    },
    /// Invariant suites with per-invariant margins.
    Verify {
        /// Run a single suite.
        #[arg(long)]
        suite: Option<String>,
        /// Override every tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Config supplying tolerance overrides and the output directory.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<Config, CliError> {
    Config::load(path).map_err(CliError::Config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cfg, out) = match cli.command {
        Command::Surface { config } => {
            let cfg = load(&config)?;
            let out = cmd_surface(&cfg)?;
            (cfg, out)
        }
        Command::Flow { config } => {
            let cfg = load(&config)?;
            let out = cmd_flow(&cfg)?;
            (cfg, out)
        }
        Command::Weingarten { config } => {
            let cfg = load(&config)?;
            let out = cmd_weingarten(&cfg)?;
            (cfg, out)
        }
        Command::Verify { suite, tol, config } => {
            if tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                return Err(CliError::Config("--tol must be a finite non-negative number".into()));
            }
            let cfg = config.as_deref().map(load).transpose()?;
            let base = cfg.as_ref().map(Config::tolerances).unwrap_or_else(Tolerances::default);
            let prefix = cfg.as_ref().map(|c| c.outputs.prefix.clone()).unwrap_or_else(|| "horosurf".into());
            let (out, report) = cmd_verify(suite.as_deref(), &base.with_global(tol), &prefix)?;
            emit(&out, cfg.as_ref().and_then(Config::output_dir).as_deref())?;
            if !report.pass {
                let failed: Vec<&str> =
                    report.records.iter().filter(|r| !r.pass).map(|r| r.invariant.as_str()).collect();
                return Err(CliError::Verification(failed.join(", ")));
            }
            return Ok(());
        }
    };
    emit(&out, cfg.output_dir().as_deref())
}

fn main() -> ExitCode {
    // usage errors are config errors here, not clap's default code 2
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("horosurf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
