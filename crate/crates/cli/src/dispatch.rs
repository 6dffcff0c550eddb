//! Subcommand parsing and execution. Each command prints one result line on
//! stdout; diagnostics go to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gromov_core::io::{format_matrix, format_real};
use gromov_core::lattice::{ball_count, parse_rational, to_f64, witness_report, Rational};
use gromov_core::{gh_exact, hausdorff_distance};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::experiment::{read_space, run_experiment, solver_options_from_env, write_atomic};

/// Exit status for usage errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "gromov-lab", version, about = "Gromov-Hausdorff distances between finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a matrix file describes a metric space
    Validate { file: PathBuf },
    /// Exact Gromov-Hausdorff distance between two matrix files
    Gh {
        file1: PathBuf,
        file2: PathBuf,
        /// Node budget for the search (overrides GROMOV_LAB_MAX_NODES)
        #[arg(long)]
        budget: Option<u64>,
        /// Write the full certificate to this file
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// ℓ¹ product of two spaces
    Product {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Multiply every distance by t
    Scale {
        file: PathBuf,
        #[arg(allow_negative_numbers = true)]
        t: f64,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Hausdorff distance between two index subsets of one space
    Hausdorff {
        file: PathBuf,
        #[arg(long = "i", value_delimiter = ',', required = true)]
        i: Vec<usize>,
        #[arg(long = "j", value_delimiter = ',', required = true)]
        j: Vec<usize>,
    },
    /// Lattice point counts and witnesses
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Run an experiment described by a config file
    Run { config: PathBuf },
}

#[derive(Debug, Subcommand)]
enum LatticeCommand {
    /// Points of Zⁿ in the ball of radius p/q
    Count { n: usize, radius: String },
    /// Smallest integer t in 1..=tmax with N(t) > N'(t)
    Witness {
        n: usize,
        lambda: String,
        c: String,
        tmax: u32,
        /// Also write the report as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit status.
pub fn cli_dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            let _ = writeln!(err, "gromov-lab: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Validate { file } => {
            let x = read_space(&file)?;
            writeln!(out, "ok points={} diameter={}", x.len(), format_real(x.diameter()))?;
            Ok(0)
        }
        Command::Gh { file1, file2, budget, certificate } => {
            let x = read_space(&file1)?;
            let y = read_space(&file2)?;
            let mut opts = solver_options_from_env()?;
            if let Some(b) = budget {
                opts.node_budget = b;
            }
            let cert = gh_exact(&x, &y, &opts)?;
            if let Some(path) = certificate {
                write_atomic(&path, cert.to_text().as_bytes())?;
            }
            writeln!(out, "{}", format_real(cert.value))?;
            Ok(if cert.lower_proof.is_optimal() { 0 } else { 3 })
        }
        Command::Product { file1, file2, out: path } => {
            let p = read_space(&file1)?.l1_product(&read_space(&file2)?)?;
            write_atomic(&path, format_matrix(&p).as_bytes())?;
            writeln!(out, "points={} out={}", p.len(), path.display())?;
            Ok(0)
        }
        Command::Scale { file, t, out: path } => {
            let s = read_space(&file)?.scale(t)?;
            write_atomic(&path, format_matrix(&s).as_bytes())?;
            writeln!(out, "points={} out={}", s.len(), path.display())?;
            Ok(0)
        }
        Command::Hausdorff { file, i, j } => {
            let z = read_space(&file)?;
            writeln!(out, "{}", format_real(hausdorff_distance(&i, &j, &z)?))?;
            Ok(0)
        }
        Command::Lattice { command: LatticeCommand::Count { n, radius } } => {
            writeln!(out, "{}", ball_count(n, &parse_rational(&radius)?)?)?;
            Ok(0)
        }
        Command::Lattice { command: LatticeCommand::Witness { n, lambda, c, tmax, csv } } => {
            let grid: Vec<Rational> = (1..=tmax as i128).map(Rational::from_integer).collect();
            let report = witness_report(n, parse_rational(&lambda)?, parse_rational(&c)?, &grid)?;
            if let Some(path) = &csv {
                write_atomic(path, report.to_csv().as_bytes())?;
            }
            match (report.witness_t, report.rows.last()) {
                (Some(t), Some(row)) => writeln!(
                    out,
                    "witness_t={} N={} Nprime={}",
                    format_real(to_f64(&t)),
                    row.count,
                    row.count_prime
                )?,
                _ => writeln!(out, "witness_t=none")?,
            }
            Ok(0)
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_experiment(&cfg)?;
            writeln!(
                out,
                "{} csv={} manifest={}",
                outcome.output.summary,
                outcome.csv_path.display(),
                outcome.manifest_path.display()
            )?;
            Ok(outcome.exit_code())
        }
    }
}

