use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use exlab::config::ExperimentConfig;
use exlab::emit::{emit, write_csv, write_json, Format};
use exlab::formulas::{evaluate, Formula, FormulaArgs};
use exlab::harness::{self, cap_override, CAP_ENV, QUANTUM_CAP};
use exlab::verify::{self, Scope, Suite};
use exlab::{BoundEntry, HarnessError, ResultRecord};
use exlab_core::bounds::a_k;
use exlab_core::ExactRational;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "exlab", version, about = "Simulate and verify exclusion-game strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Result file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the file extension, then csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Record wall time per result (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run invariant suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Run one experiment.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run an experiment over its [sweep] grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate one closed-form quantity.
    Bounds {
        #[arg(long, value_enum)]
        formula: Formula,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: Option<usize>,
        /// Rational `p/q`.
        #[arg(long)]
        gamma: Option<ExactRational>,
        #[arg(long)]
        r: Option<u32>,
        /// Message qubits for size and accuracy formulas; defaults to n.
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cap_override() {
        if cap > QUANTUM_CAP {
            eprintln!("warning: {CAP_ENV}={cap}; state vectors need 2^{cap} amplitudes per message");
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Verify { suite, n, m } => {
            let checks = verify::run(suite, Scope { n, m });
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            println!("{} checks, {failed} failed", checks.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
        }
        Command::Simulate { config, output } => {
            let config = ExperimentConfig::load(&config)?;
            let record = if output.timing { harness::run_timed(&config)? } else { harness::run(&config)? };
            write_records(&[record], &config, &output)
        }
        Command::Sweep { config, output } => {
            let config = ExperimentConfig::load(&config)?;
            let records = harness::sweep(&config, output.timing)?;
            write_records(&records, &config, &output)
        }
        Command::Bounds { formula, n, m, k, gamma, r, qubits, l, epsilon, gap, tau, out, format } => {
            let args = FormulaArgs { n, m, k, gamma: gamma.clone(), r, qubits, l, epsilon, gap, tau };
            let entries = evaluate(formula, &args)?;
            match out {
                Some(path) => {
                    let record = bounds_record(n, m, k, r, gamma, entries);
                    let format = format.or_else(|| Format::from_path(&path)).unwrap_or(Format::Csv);
                    emit(&[record], format, &path)?;
                }
                None => {
                    for BoundEntry { name, value } in &entries {
                        println!("{name} = {value}");
                    }
                    if formula == Formula::Ak {
                        println!("a_k (50 digits) = {}", a_k(n, m, k.expect("checked"))?.to_decimal(50));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bounds_record(
    n: usize,
    m: usize,
    k: Option<usize>,
    r: Option<u32>,
    gamma: Option<ExactRational>,
    bounds: Vec<BoundEntry>,
) -> ResultRecord {
    ResultRecord {
        suite: "bounds".into(),
        n,
        m,
        gamma: gamma.unwrap_or_else(ExactRational::zero),
        strategy: String::new(),
        param_k: k,
        param_r: r,
        param_t: None,
        cost: None,
        worst_err: None,
        mean_err: None,
        bounds,
        seed: 0,
        trials: None,
        wall_time: None,
    }
}

fn write_records(records: &[ResultRecord], config: &ExperimentConfig, output: &Output) -> Result<ExitCode, HarnessError> {
    let path = output.out.clone().or_else(|| config.output_path.as_ref().map(PathBuf::from));
    let format = output
        .format
        .or_else(|| path.as_deref().and_then(Format::from_path))
        .or(config.format)
        .unwrap_or(Format::Csv);
    match path {
        Some(path) => emit(records, format, Path::new(&path))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match format {
                Format::Csv => write_csv(records, &mut lock)?,
                Format::Json => write_json(records, &mut lock)?,
            }
            lock.flush().map_err(|e| HarnessError::Json(serde_json::Error::io(e)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
