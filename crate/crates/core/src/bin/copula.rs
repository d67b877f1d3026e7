//! `copula`: evaluate, tabulate, audit, estimate tau and sample.
//!
//! Exit codes: 0 success, 1 failed validity check, 2 usage or domain error,
//! 3 numerical convergence failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use copula_core::diagnostics::to_sorted_json;
use copula_core::grid::{grid_csv, GridWhat};
use copula_core::sampling::read_pairs_csv;
use copula_core::{
    grid_validity_report, kendall_tau_closed, kendall_tau_mc, kendall_tau_quadrature,
    sample_conditional, sample_frailty_copula, Archimedean, CopulaError, DependenceParam,
    FamilyId, SampleBatch, UnitPoint,
};

const MC_BLOCKS: usize = 20;

#[derive(Parser)]
#[command(name = "copula", version, about = "Archimedean copula toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print C(u,v) and, at interior points, the density c(u,v).
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        v: f64,
    },
    /// Tabulate the generator, CDF or density as CSV.
    Grid {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, default_value_t = 50)]
        grid_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit copula validity on a lattice; prints a JSON report.
    Check {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 100)]
        grid_n: usize,
    },
    /// Kendall tau by closed form, quadrature or Monte Carlo; prints JSON.
    Tau {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        method: TauArg,
        /// Sample size for a generated Monte Carlo sample.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sampler for a generated Monte Carlo sample.
        #[arg(long, value_enum, default_value_t = SamplerArg::Conditional)]
        sampler: SamplerArg,
        /// Read `u,v` pairs from a CSV file (`-` for stdin) instead of sampling.
        #[arg(long)]
        input: Option<String>,
        #[arg(long, default_value_t = MC_BLOCKS)]
        blocks: usize,
        /// Absolute tolerance for quadrature.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Draw pairs and write them as `u,v` CSV.
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SamplerArg::Conditional)]
        method: SamplerArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    F1,
    F2,
    F3,
    Gumbel,
    Independence,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Cdf,
    Pdf,
    Generator,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauArg {
    Closed,
    Quadrature,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    Conditional,
    Frailty,
}

enum Failure {
    Usage(String),
    Copula(CopulaError),
    Io(String, io::Error),
    CheckFailed,
}

impl From<CopulaError> for Failure {
    fn from(e: CopulaError) -> Self {
        Failure::Copula(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl FamilyArgs {
    fn build(&self) -> CliResult<Archimedean> {
        let family = self
            .family
            .ok_or_else(|| Failure::Usage("--family is required".into()))?;
        let id = match family {
            Family::F1 => FamilyId::F1PowerLog,
            Family::F2 => FamilyId::F2PowerLogSq,
            Family::F3 => FamilyId::F3FrailtyRational,
            Family::Gumbel => FamilyId::GumbelRef,
            Family::Independence => FamilyId::Independence,
        };
        let param = match (id, self.alpha, self.theta) {
            (FamilyId::GumbelRef, None, Some(t)) => DependenceParam::Theta(t),
            (FamilyId::GumbelRef, _, _) => {
                return Err(Failure::Usage("family gumbel takes --theta (and no --alpha)".into()))
            }
            (FamilyId::Independence, None, None) => DependenceParam::None,
            (FamilyId::Independence, _, _) => {
                return Err(Failure::Usage("family independence takes no parameter".into()))
            }
            (_, Some(a), None) => DependenceParam::Alpha(a),
            (_, _, _) => {
                return Err(Failure::Usage(format!(
                    "family {id} takes --alpha (and no --theta)"
                )))
            }
        };
        Ok(Archimedean::new(id, param)?)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(path.display().to_string(), e))
        }
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io("stdout".into(), e)),
    }
}

fn read_input(source: &str) -> CliResult<String> {
    if source == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Io("stdin".into(), e))?;
        Ok(text)
    } else {
        fs::read_to_string(source).map_err(|e| Failure::Io(source.into(), e))
    }
}

fn draw(copula: &Archimedean, n: usize, seed: u64, sampler: SamplerArg) -> CliResult<SampleBatch> {
    match sampler {
        SamplerArg::Conditional => Ok(sample_conditional(copula, n, seed)?),
        SamplerArg::Frailty => match (copula.family(), copula.param()) {
            (FamilyId::F3FrailtyRational, Some(alpha)) => Ok(sample_frailty_copula(alpha, n, seed)?),
            _ => Err(Failure::Usage("the frailty sampler is only available for family f3".into())),
        },
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval { family, u, v } => {
            let copula = family.build()?;
            let pt = UnitPoint::new(u, v)?;
            let mut text = format!("C={}\n", copula.cdf(pt));
            if pt.is_interior() {
                text.push_str(&format!("c={}\n", copula.density(pt)?));
            }
            emit(&text, None)
        }
        Command::Grid {
            family,
            what,
            grid_n,
            out,
        } => {
            let copula = family.build()?;
            let what = match what {
                What::Cdf => GridWhat::Cdf,
                What::Pdf => GridWhat::Pdf,
                What::Generator => GridWhat::Generator,
            };
            emit(&grid_csv(&copula, what, grid_n)?, out.as_ref())
        }
        Command::Check { family, grid_n } => {
            let copula = family.build()?;
            let report = grid_validity_report(&copula, grid_n)?;
            emit(&(to_sorted_json(&report) + "\n"), None)?;
            if report.passed.all() {
                Ok(())
            } else {
                Err(Failure::CheckFailed)
            }
        }
        Command::Tau {
            family,
            method,
            n,
            seed,
            sampler,
            input,
            blocks,
            tol,
        } => {
            let estimate = match method {
                TauArg::Closed => kendall_tau_closed(&family.build()?),
                TauArg::Quadrature => kendall_tau_quadrature(&family.build()?, tol)?,
                TauArg::Mc => {
                    let pairs = match (input, n, seed) {
                        (Some(src), None, None) => read_pairs_csv(&read_input(&src)?)?,
                        (None, Some(n), Some(seed)) => draw(&family.build()?, n, seed, sampler)?.pairs,
                        _ => {
                            return Err(Failure::Usage(
                                "--method mc needs either --input or both --n and --seed".into(),
                            ))
                        }
                    };
                    if let Some(bad) = pairs.iter().find(|(u, v)| !(u.is_finite() && v.is_finite())) {
                        return Err(Failure::Usage(format!("non-finite pair {bad:?} in input")));
                    }
                    kendall_tau_mc(&pairs, blocks)?
                }
            };
            emit(&(to_sorted_json(&estimate) + "\n"), None)
        }
        Command::Sample {
            family,
            n,
            seed,
            method,
            out,
        } => {
            let batch = draw(&family.build()?, n, seed, method)?;
            emit(&batch.to_csv(), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(what, e)) => {
            eprintln!("error: {what}: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Copula(e)) => {
            eprintln!("error: {e}");
            if e.is_convergence() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
