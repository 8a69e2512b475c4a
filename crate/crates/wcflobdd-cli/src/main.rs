use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use wcflobdd::semifield::set_rounding_digits;
use wcflobdd::Instance;
use wcflobdd_cli::bench::{run_suite, BenchConfig, RowWriter, Suite};
use wcflobdd_cli::commands::{self, BinaryOp, Family};

#[derive(Parser)]
#[command(name = "wcflobdd", version, about = "Weighted CFLOBDD toolkit")]
struct Cli {
    /// Weight domain for commands that build diagrams.
    #[arg(long, global = true, value_enum, default_value = "rational")]
    instance: InstanceArg,
    /// Seed for sampling, measurement and generated hidden strings.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceArg {
    Rational,
    Float,
    Complex,
}

impl From<InstanceArg> for Instance {
    fn from(i: InstanceArg) -> Self {
        match i {
            InstanceArg::Rational => Instance::Rational,
            InstanceArg::Float => Instance::Real,
            InstanceArg::Complex => Instance::Complex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Synthetic,
    Separation,
    Quantum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Mul,
    Add,
    Kron,
    Matmul,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Exp,
    Hadamard,
    Identity,
    Not,
    Zero,
    One,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark suite and emit one report row per unit.
    Bench {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Comma-separated parameters (levels, or qubit counts for quantum).
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<usize>>,
        /// Suite budget in seconds, checked between units.
        #[arg(long, default_value_t = 900)]
        timeout: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate a dumped diagram on a bit string.
    Eval { diagram: PathBuf, bits: String },
    /// Check a dumped diagram; exit status 1 if anything is violated.
    Validate { diagram: PathBuf },
    /// Graphviz DOT for a dumped diagram.
    Export { diagram: PathBuf },
    /// Simulate a circuit file and print the measurement histogram.
    Run {
        circuit: PathBuf,
        #[arg(long, default_value_t = 1024)]
        shots: usize,
        /// Only parse the circuit and print it back.
        #[arg(long)]
        echo: bool,
    },
    /// Combine two dumped diagrams.
    Op {
        #[arg(value_enum)]
        op: OpArg,
        left: PathBuf,
        right: PathBuf,
    },
    /// Draw assignments in proportion to path weights.
    Sample {
        diagram: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Dump a member of a built-in family.
    Make {
        #[arg(value_enum)]
        family: FamilyArg,
        /// Variable count for exp, level otherwise.
        param: usize,
    },
    /// Fold a fixture of leaf weights into a dump.
    Fold {
        fixture: PathBuf,
        /// Read the fixture as a row-major square matrix.
        #[arg(long)]
        matrix: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<ExitCode> {
    let instance: Instance = cli.instance.into();
    let text = match cli.command {
        Command::Bench { suite, params, timeout, format } => {
            let suite = match suite {
                SuiteArg::Synthetic => Suite::Synthetic,
                SuiteArg::Separation => Suite::Separation,
                SuiteArg::Quantum => Suite::Quantum,
            };
            let cfg = BenchConfig {
                suite,
                params,
                instance,
                timeout: Duration::from_secs(timeout),
                seed: cli.seed,
            };
            let out = sink(&cli.out)?;
            let mut writer = match format {
                Format::Csv => RowWriter::csv(out)?,
                Format::Json => RowWriter::json(out),
            };
            let rows = run_suite(&cfg, |row| {
                if let Some(m) = &row.message {
                    eprintln!("{} {} {}: {m}", row.suite, row.bench, row.param);
                }
                writer.write(row)
            })?;
            let failed = rows.iter().any(|r| r.status != wcflobdd_cli::bench::Status::Ok);
            return Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS });
        }
        Command::Eval { diagram, bits } => commands::eval(&read(&diagram)?, &bits)?,
        Command::Validate { diagram } => {
            let (report, clean) = commands::validate_dump(&read(&diagram)?)?;
            sink(&cli.out)?.write_all(report.as_bytes())?;
            return Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Export { diagram } => commands::export(&read(&diagram)?)?,
        Command::Run { circuit, shots, echo } => {
            let text = read(&circuit)?;
            if echo {
                commands::check_circuit(&text)?
            } else {
                commands::run(&text, shots, cli.seed)?
            }
        }
        Command::Op { op, left, right } => {
            let op = match op {
                OpArg::Mul => BinaryOp::Mul,
                OpArg::Add => BinaryOp::Add,
                OpArg::Kron => BinaryOp::Kron,
                OpArg::Matmul => BinaryOp::Matmul,
            };
            commands::op(op, &read(&left)?, &read(&right)?)?
        }
        Command::Sample { diagram, count } => commands::sample(&read(&diagram)?, cli.seed, count)?,
        Command::Make { family, param } => {
            let family = match family {
                FamilyArg::Exp => Family::Exp,
                FamilyArg::Hadamard => Family::Hadamard,
                FamilyArg::Identity => Family::Identity,
                FamilyArg::Not => Family::Not,
                FamilyArg::Zero => Family::Zero,
                FamilyArg::One => Family::One,
            };
            commands::make(family, param, instance)?
        }
        Command::Fold { fixture, matrix } => commands::fold_fixture(&read(&fixture)?, instance, matrix)?,
    };
    sink(&cli.out)?.write_all(text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Ok(d) = std::env::var("WCFLOBDD_ROUNDING_DIGITS") {
        match d.parse() {
            Ok(d) => set_rounding_digits(d),
            Err(_) => {
                eprintln!("error: WCFLOBDD_ROUNDING_DIGITS must be a number");
                return ExitCode::from(2);
            }
        }
    }
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
