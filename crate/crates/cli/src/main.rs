//! `divseries`: command-line front end for the divisor-series library.
//!
//! Exit codes: 0 success or pass, 1 failed or indeterminate check,
//! 2 usage or domain error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divisor_series::Mode;

pub const SCHEMA_VERSION: u32 = 1;
pub const PRECISION_ENV: &str = "DIVSERIES_PRECISION";

#[derive(Parser)]
#[command(name = "divseries", version, about = "Divisor-function series: identities, certified evaluation, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump coefficients of one representation of T(q)
    Coeffs(CoeffsArgs),
    /// Compare every representation against the divisor series
    IdentityCheck(IdentityArgs),
    /// Evaluate T, psi_q, H or F at a point
    Eval(EvalArgs),
    /// Evaluate one of the auxiliary functions
    LemmaFn(LemmaArgs),
    /// Check a double inequality on a rational grid, as CSV
    BoundsScan(ScanArgs),
    /// Run a verification pipeline and emit its certificate
    Verify(VerifyArgs),
    /// Run the whole suite and summarize it
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fast,
    Certified,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Fast => Mode::Fast,
            ModeArg::Certified => Mode::Certified,
        }
    }
}

#[derive(Args)]
pub struct CoeffsArgs {
    /// DIVISOR, LAMBERT, CLAUSEN, UCHIMURA, MERCA_ALT or MERCA_PARTITION
    #[arg(long)]
    pub repr: String,
    #[arg(long)]
    pub order: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 200)]
    pub order: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FnName {
    #[value(name = "T", alias = "t")]
    T,
    #[value(name = "psi")]
    Psi,
    #[value(name = "H", alias = "h")]
    H,
    #[value(name = "F", alias = "f")]
    F,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: FnName,
    /// Point in (0, 1), decimal or fraction
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Argument of psi_q
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 1e-15)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "fast")]
    pub mode: ModeArg,
    /// Series route for T, H and F
    #[arg(long, default_value = "LAMBERT")]
    pub repr: String,
    /// Also print the enclosure endpoints with this many significant digits
    #[arg(long)]
    pub digits: Option<usize>,
}

#[derive(Args)]
pub struct LemmaArgs {
    /// phi, phi_prime, phi_second, a, b, Phi, A, sigma, rho, C, D, U, V,
    /// V_prime, Theta, K, h1, h2, h3, Delta, G, G0, M, N
    #[arg(long)]
    pub name: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long, value_enum, default_value = "certified")]
    pub mode: ModeArg,
    #[arg(long)]
    pub digits: Option<usize>,
}

#[derive(Args)]
pub struct ScanArgs {
    /// SALEM_1_3, T4_1, T4_2, T4_3, T4_4 or C3_3
    #[arg(long)]
    pub theorem: String,
    #[arg(long, default_value = "0.01")]
    pub grid_start: String,
    #[arg(long, default_value = "0.99")]
    pub grid_end: String,
    #[arg(long, default_value = "0.01")]
    pub grid_step: String,
    #[arg(long, value_enum, default_value = "certified")]
    pub mode: ModeArg,
    /// Replace the lower constant of the inequality
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<String>,
    /// Replace the upper constant of the inequality
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// 2.4i, 2.4ii, 2.5, 2.8, 2.9 or thm3.2
    #[arg(long)]
    pub lemma: String,
    #[arg(long, value_enum, default_value = "certified")]
    pub mode: ModeArg,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Section {
    Identities,
    Verify,
    Bounds,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long, value_enum)]
    pub skip: Vec<Section>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Directory for the per-theorem CSV files of `--format csv`
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeffs(a) => commands::coeffs(&a),
        Command::IdentityCheck(a) => commands::identity_check(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::LemmaFn(a) => commands::lemma_fn(&a),
        Command::BoundsScan(a) => commands::with_jobs(a.jobs, || commands::bounds_scan(&a)),
        Command::Verify(a) => commands::with_jobs(a.jobs, || commands::verify(&a)),
        Command::Report(a) => commands::with_jobs(a.jobs, || commands::report(&a)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("divseries: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
