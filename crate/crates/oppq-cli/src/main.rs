mod commands;
mod config;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::Failure;
use config::{ConfigError, FileConfig, RunConfig, Scalar};
use oppq::oracle::OracleConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "oppq", version, about = "Orthogonal polynomial projection quantization of sextic-family potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan determinant roots over the N range and print the convergence table.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Print the quantizing energy polynomial of a QES potential and its roots.
    QesPoly {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Print reference moments and recurrence coefficients of the basis.
    Weights {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Highest basis degree J.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Independent eigenvalues of the potential's sector.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of levels.
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Method::Numerov)]
        method: Method,
        /// JSON cache of computed spectra.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run the invariant suite and report pass/fail per property.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Negate the reference moment at this index before the positivity check.
        #[arg(long, value_name = "INDEX")]
        corrupt_moment: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Numerov,
    Basis,
    Taylor,
}

#[derive(Args)]
struct ProblemArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// sextic or bender-dunne.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i64>,
    #[arg(long = "J", allow_hyphen_values = true)]
    j: Option<i64>,
    /// Parity sector, 0 or 1.
    #[arg(long)]
    sigma: Option<u32>,
    /// psi-mu, psi-u, phi-nu, bd-a, bd-tilde or bd-bessis.
    #[arg(long)]
    representation: Option<String>,
    /// full, phi-segmented, non-qes-same-parity or bd-full.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Working precision in decimal digits (default: OPPQ_DIGITS or 60).
    #[arg(long)]
    digits: Option<u32>,
    /// Energy window as LO,HI.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// csv, json or pretty-table.
    #[arg(long)]
    output: Option<String>,
    #[arg(long, conflicts_with = "no_oracle")]
    oracle: bool,
    #[arg(long)]
    no_oracle: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decimals in tables and CSV.
    #[arg(long, default_value_t = 6)]
    decimals: usize,
}

impl ProblemArgs {
    fn flags(&self) -> Result<FileConfig, ConfigError> {
        let window = match &self.window {
            None => None,
            Some(w) => {
                let (lo, hi) = w
                    .split_once(',')
                    .ok_or_else(|| ConfigError::new("window", format!("expected LO,HI, got {w:?}")))?;
                Some((Scalar::from(lo.trim()), Scalar::from(hi.trim())))
            }
        };
        let text = |v: &Option<String>| v.as_deref().map(Scalar::from);
        Ok(FileConfig {
            family: self.family.clone(),
            g: text(&self.g),
            b: text(&self.b),
            m: text(&self.m),
            gamma: text(&self.gamma),
            s: self.s,
            j: self.j,
            sigma: self.sigma,
            representation: self.representation.clone(),
            mode: self.mode.clone(),
            n_min: self.n_min,
            n_max: self.n_max,
            digits: self.digits,
            window,
            output: self.output.clone(),
            oracle: match (self.oracle, self.no_oracle) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
        })
    }

    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        RunConfig::resolve(&file.overlay(self.flags()?))
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure::Lib(e.into())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { problem } => {
            let cfg = problem.resolve()?;
            problem.emit(&commands::solve(&cfg, problem.decimals)?)
        }
        Command::QesPoly { problem } => {
            let cfg = problem.resolve()?;
            problem.emit(&commands::qes_poly(&cfg, problem.decimals)?)
        }
        Command::Weights { problem, count } => {
            let cfg = problem.resolve()?;
            problem.emit(&commands::weights(&cfg, count)?)
        }
        Command::Oracle { problem, levels, method, cache } => {
            let cfg = problem.resolve()?;
            let ocfg = match method {
                Method::Numerov => OracleConfig::numerov(),
                Method::Basis => OracleConfig::harmonic_basis(),
                Method::Taylor => OracleConfig::taylor(cfg.prec.digits()),
            };
            problem.emit(&commands::oracle(&cfg, levels, &ocfg, cache, problem.decimals)?)
        }
        Command::Verify { problem, corrupt_moment } => {
            let cfg = problem.resolve()?;
            let (text, failed) = commands::verify(&cfg, corrupt_moment)?;
            problem.emit(&text)?;
            if failed > 0 {
                return Err(Failure::Verify(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oppq: {e}");
            if let Failure::Config(c) = &e {
                if c.field == "mode" {
                    eprintln!("known modes: {}", commands::mode_names());
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
