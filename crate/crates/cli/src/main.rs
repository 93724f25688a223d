mod commands;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Mahler measures, the curve-side algebra behind them, and integer
/// relations against L-values.
#[derive(Parser, Debug)]
#[command(name = "mahler-lab", version)]
pub struct Cli {
    /// Decimal digits of precision (default 30; 8 for three-variable measures).
    #[arg(long, global = true, env = "MAHLERLAB_DIGITS")]
    pub digits: Option<u32>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Denominator bound for root-of-unity tags.
    #[arg(long, global = true, default_value_t = 120)]
    pub unity_bound: u64,
    /// Worker threads for the parallel parts.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Track,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Logarithmic Mahler measure of a polynomial in t1, t2 (and t3).
    Measure {
        poly: String,
        #[arg(long, value_enum, default_value = "quad")]
        method: MethodArg,
    },
    /// Follow the t2-roots around the circle and split them into paths.
    Track {
        poly: String,
        /// Write every arc with its samples to this JSON file.
        #[arg(long)]
        dump_arcs: Option<PathBuf>,
    },
    /// Points of Z(P) on the torus, and singular points of Z(P).
    Torus { poly: String },
    /// Newton polygon with side polynomials.
    Newton { poly: String },
    /// Temperedness test with obstructions.
    Tempered { poly: String },
    /// Elliptic-curve data.
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Split the genus-2 curve of a quadratic-in-t2 polynomial.
    Genus2 { poly: String },
    /// Special values of L-functions.
    Lvalue(LvalueArgs),
    /// Search for an identity between m(P) and L-values.
    Discover {
        poly: String,
        /// Largest coefficient searched.
        #[arg(long, default_value_t = 1_000_000)]
        height: u64,
        /// Explicit basis, e.g. "jac; chi:3:2; chi:4:3".
        #[arg(long)]
        basis: Option<String>,
        /// Skip the re-check at 1.5 times the digits.
        #[arg(long)]
        no_verify: bool,
    },
    /// Run `discover` over a file of polynomials and write CSV.
    Batch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        height: u64,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        no_verify: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CurveCmd {
    /// The curve C_k attached to P_k, with reduction and boundary data.
    Pk {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Restrict to one prime.
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Invariants, minimal model and reduction types of [a1,a2,a3,a4,a6].
    Info {
        #[arg(allow_hyphen_values = true)]
        coeffs: String,
    },
}

#[derive(Args, Debug)]
pub struct LvalueArgs {
    /// Dirichlet character as a Conrey label m:n.
    #[arg(long)]
    pub dirichlet: Option<String>,
    /// L'(chi, -1) for the character.
    #[arg(long)]
    pub at_minus1: bool,
    /// L(chi, s) at a real point s.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Curve coefficients "a1,a2,a3,a4,a6".
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// L'(E, 0) for the curve.
    #[arg(long = "Lprime0", alias = "lprime0")]
    pub lprime0: bool,
    /// zeta'(-2).
    #[arg(long)]
    pub zeta_prime_minus2: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            if !out.is_empty() {
                // A closed pipe downstream is not an error worth reporting.
                let _ = writeln!(std::io::stdout().lock(), "{out}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
