//! `sudiag`: data and verdicts for diagonal products of SU(n).
//!
//! Exit codes: 0 success or member, 1 outside or failed verification,
//! 2 usage, 3 I/O, 4 solver non-convergence.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use num_complex::Complex64;

use commands::{ExtremalInput, VerifyKind, VerifyParams};
use output::{Format, OutputRecord};
use sudiag_core::RngSeed;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    /// Negative verdict that is not a failure of the program.
    Negative(String),
    NonConvergence(f64),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Negative(m) => f.write_str(m),
            CliError::NonConvergence(r) => {
                write!(f, "preimage solver did not converge; best residual {r:.3e}")
            }
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sudiag", version, about = "Diagonal products of special unitary matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Emit {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn dimension(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=256).contains(&n) {
        Ok(n)
    } else {
        Err("n must be in 1..=256".into())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the closed boundary curve at alpha_k = -pi + 2 pi k / samples.
    ///
    /// Columns: alpha, re, im, theta, r.
    Boundary {
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[command(flatten)]
        emit: Emit,
    },
    /// Grid image of Gamma(alpha, y) over [0, pi] x [1, n-1].
    ///
    /// Columns: alpha, y, re, im, jacobian. The header carries the reference
    /// radius (1-2/n)^n.
    GammaImage {
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        alpha_samples: usize,
        #[arg(long, default_value_t = 64)]
        y_samples: usize,
        #[command(flatten)]
        emit: Emit,
    },
    /// Classify z against the SU(n) image. Prints one line; exit 1 if outside.
    Membership {
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true)]
        im: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Polyline samples for the winding oracle.
        #[arg(long, default_value_t = 8192)]
        samples: usize,
    },
    /// Build a boundary-attaining matrix from a polar angle or a curve parameter.
    ///
    /// Columns: re_j, im_j for each matrix column j; one row per matrix row.
    #[command(group(ArgGroup::new("param").required(true).args(["theta", "alpha"])))]
    Extremal {
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Random phases drawn from --seed.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        emit: Emit,
    },
    /// Explicit SU(n) matrix with diagonal product z.
    ///
    /// Columns as for `extremal`; the header carries alpha, omega and the residual.
    Preimage {
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true)]
        im: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        emit: Emit,
    },
    /// Run a verification and write its report.
    ///
    /// Columns: index, measured, expected, error, label.
    Verify {
        #[arg(long, value_enum)]
        kind: VerifyKind,
        #[arg(long, value_parser = dimension)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Lattice size for prop1.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Homotopy sweep steps for so.
        #[arg(long, default_value_t = 10_000)]
        sweep: usize,
        /// Interior points for preimage.
        #[arg(long, default_value_t = 100)]
        points: u64,
        /// Ray angle for constrained-max.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        emit: Emit,
    },
}

fn emit(rec: &OutputRecord, emit: &Emit) -> Result<(), CliError> {
    match &emit.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            rec.write(emit.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            rec.write(emit.format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Boundary { n, samples, emit: e } => {
            emit(&commands::boundary_curve(n, samples)?, &e)?;
            Ok(0)
        }
        Command::GammaImage {
            n,
            alpha_samples,
            y_samples,
            emit: e,
        } => {
            emit(&commands::gamma_image(n, alpha_samples, y_samples)?, &e)?;
            Ok(0)
        }
        Command::Membership { n, re, im, tol, samples } => {
            let m = commands::membership(n, Complex64::new(re, im), tol, samples)?;
            println!("{}", m.line);
            Ok(if m.member { 0 } else { 1 })
        }
        Command::Extremal {
            n,
            theta,
            alpha,
            seed,
            emit: e,
        } => {
            let input = match (theta, alpha) {
                (Some(t), None) => ExtremalInput::Theta(t),
                (None, Some(a)) => ExtremalInput::Alpha(a),
                _ => return Err(CliError::Usage("give exactly one of --theta, --alpha".into())),
            };
            emit(&commands::extremal(n, input, RngSeed(seed))?, &e)?;
            Ok(0)
        }
        Command::Preimage { n, re, im, tol, emit: e } => {
            emit(&commands::preimage(n, Complex64::new(re, im), tol)?, &e)?;
            Ok(0)
        }
        Command::Verify {
            kind,
            n,
            trials,
            grid,
            sweep,
            points,
            theta,
            restarts,
            tol,
            seed,
            emit: e,
        } => {
            let params = VerifyParams {
                kind,
                n,
                trials,
                grid,
                sweep,
                points,
                theta,
                restarts,
                tol,
                seed: RngSeed(seed),
            };
            let report = commands::verify(&params)?;
            emit(&commands::report_record(&report, &params), &e)?;
            eprintln!(
                "verify {}: {} checks, {} failures, {:.3}s",
                report.kind.as_str(),
                report.trials,
                report.failures,
                report.elapsed.as_secs_f64()
            );
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sudiag: {e}");
            ExitCode::from(e.code())
        }
    }
}
