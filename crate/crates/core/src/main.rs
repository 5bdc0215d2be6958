use clap::{Args, Parser, Subcommand};
use mpsrg::cli::{
    cmd_ansatz_compare, cmd_fidelity, cmd_sweep, cmd_verify, parse_block_sizes, write_output, AnsatzConfig, FidelityConfig,
    Grid, LogBase, SweepConfig, VerifyConfig,
};
use mpsrg::models::Model;
use mpsrg::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_NUMERIC: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "mpsrg", version, about = "Block geometric entanglement of matrix product states under RG")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-block entanglement against the closed forms over a coupling grid.
    Sweep(SweepArgs),
    /// Logarithmic fidelity per site over a square coupling grid.
    Fidelity(FidelityArgs),
    /// Brute-force entanglement density under identical, alternating and arbitrary product states.
    AnsatzCompare(AnsatzArgs),
    /// Checks that the MPS is a ground state of its parent Hamiltonian.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -2.0)]
    g_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
    g_max: f64,
    #[arg(long, default_value_t = 401)]
    steps: usize,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    model: Model,
    /// `e` (default) or a number; affects printed values only.
    #[arg(long, default_value = "e")]
    log_base: LogBase,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated block sizes; `inf` selects the fixed point.
    #[arg(long = "L", default_value = "2,4,8")]
    block_sizes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct AnsatzArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 10)]
    n_sites: usize,
    /// Sites per product factor.
    #[arg(long = "L", default_value_t = 1)]
    block_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    model: Model,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    #[arg(long, default_value_t = 8)]
    n_sites: usize,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::UnsupportedParameter(_) | Error::UnsupportedModel(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn grid(args: &GridArgs) -> Result<Grid, Failure> {
    Ok(Grid::new(args.g_min, args.g_max, args.steps)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_output(path, text).map_err(|e| Failure::Numeric(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    match cli.command {
        Command::Sweep(a) => {
            let mut cfg = SweepConfig::new(a.common.model, grid(&a.grid)?, parse_block_sizes(&a.block_sizes)?)?;
            cfg.seed = a.seed;
            cfg.restarts = a.restarts;
            cfg.tol = a.tol;
            cfg.log_base = a.common.log_base;
            for l in &cfg.block_sizes {
                if matches!(l, mpsrg::cli::BlockSize::Finite(n) if n % 2 == 1) {
                    eprintln!("warning: odd block size {l}; identical-block results may be unreliable");
                }
            }
            emit(&a.common.out, &cmd_sweep(&cfg)?)?;
            Ok(true)
        }
        Command::Fidelity(a) => {
            let cfg = FidelityConfig {
                model: a.common.model,
                grid: grid(&a.grid)?,
                log_base: a.common.log_base,
            };
            emit(&a.common.out, &cmd_fidelity(&cfg)?)?;
            Ok(true)
        }
        Command::AnsatzCompare(a) => {
            let cfg = AnsatzConfig {
                model: a.common.model,
                grid: grid(&a.grid)?,
                n_sites: a.n_sites,
                block_size: a.block_size,
                seed: a.seed,
                restarts: a.restarts,
                tol: a.tol,
                log_base: a.common.log_base,
            };
            emit(&a.common.out, &cmd_ansatz_compare(&cfg)?)?;
            Ok(true)
        }
        Command::Verify(a) => {
            let cfg = VerifyConfig {
                model: a.model,
                g: if a.model.has_coupling() { a.g } else { None },
                n_sites: a.n_sites,
            };
            let (text, ok) = cmd_verify(&cfg)?;
            print!("{text}");
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERIC),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
