//! `vmdgap`: tiling enumeration, spectra, bounds and the acceptance suites
//! from the command line.

mod run;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::run::Failure;
use crate::spec::{Command, Format, RunSpec, SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "vmdgap", version, about = "Exact numerics for the truncated dipole-conserving boson chain")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed of the Krylov start vectors.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest admissible number of stored matrix entries.
    #[arg(long, global = true, env = "VMDGAP_BUDGET_DIM", default_value_t = 2_000_000)]
    budget: usize,

    /// Print the run spec instead of running it.
    #[arg(long, global = true)]
    emit_spec: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the roots of a tiling family with class sizes.
    Tilings {
        #[arg(long = "L")]
        len: usize,
        #[arg(long, default_value = "obc-bulk")]
        family: String,
        /// Only count and list roots, skip the class expansion.
        #[arg(long)]
        roots_only: bool,
    },
    /// Diagonalise a sector, a tiling family, a complement or a seed closure.
    Spectrum(SpectrumArgs),
    /// Run an acceptance suite.
    Verify(VerifyArgs),
    /// Evaluate the closed-form bounds over a (κ, |λ|) grid.
    Bounds {
        #[arg(long, value_delimiter = ',', default_value = "1")]
        kappa: Vec<f64>,
        #[arg(long = "lambda", value_delimiter = ',', default_value = "0.5")]
        abs_lambda: Vec<f64>,
    },
    /// Execute a run spec previously produced with --emit-spec.
    Run {
        spec: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Chain length; defaults to the length of --seed-config.
    #[arg(long = "L")]
    len: Option<usize>,
    #[arg(long, default_value = "obc")]
    bc: String,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// |λ|.
    #[arg(long = "lambda", default_value_t = 0.5)]
    abs_lambda: f64,
    /// arg λ in radians; π gives the physical sign.
    #[arg(long = "lambda-phase", default_value_t = std::f64::consts::PI)]
    phase: f64,
    #[arg(long = "n-max", default_value_t = 4)]
    n_max: u8,
    /// Restrict to the span of a tiling family.
    #[arg(long)]
    family: Option<String>,
    /// Particle number of the sector.
    #[arg(long = "N")]
    particles: Option<u32>,
    /// Diagonalise the Hamiltonian closure of this configuration.
    #[arg(long = "seed-config")]
    seed_config: Option<String>,
    /// Restrict the sector to its non-tiling configurations.
    #[arg(long)]
    complement: bool,
    /// Number of eigenvalues to report.
    #[arg(long, default_value_t = 6)]
    count: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// gss, martingale, electro, knabe, excited, scars or all.
    suite: String,
    /// Chain lengths: `7..10` or `7,8,9`.
    #[arg(long = "L")]
    lens: Option<String>,
    /// Drops the default chain lengths above this.
    #[arg(long = "Lmax", conflicts_with = "lens")]
    lmax: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    kappa: Option<Vec<f64>>,
    #[arg(long = "lambda", value_delimiter = ',')]
    abs_lambda: Option<Vec<f64>>,
    #[arg(long = "lambda-phase", default_value_t = std::f64::consts::PI)]
    phase: f64,
    /// Smaller default grids.
    #[arg(long)]
    quick: bool,
}

/// `7..10`, `7..=10` and `7,8,10` all name chain lengths.
fn parse_lens(text: &str) -> Result<Vec<usize>, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad length list {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty length range {text:?}"));
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(num).collect()
}

fn to_spec(cli: &Cli) -> Result<RunSpec, Failure> {
    let command = match &cli.command {
        Cmd::Tilings { len, family, roots_only } => Command::Tilings {
            len: *len,
            family: family.clone(),
            roots_only: *roots_only,
        },
        Cmd::Spectrum(a) => Command::Spectrum {
            len: a.len,
            bc: a.bc.clone(),
            kappa: a.kappa,
            abs_lambda: a.abs_lambda,
            phase: a.phase,
            n_max: a.n_max,
            family: a.family.clone(),
            particles: a.particles,
            seed_config: a.seed_config.clone(),
            complement: a.complement,
            count: a.count,
        },
        Cmd::Verify(a) => {
            let lens = a.lens.as_deref().map(parse_lens).transpose().map_err(Failure::Usage)?;
            Command::Verify {
                suite: a.suite.clone(),
                lens,
                lmax: a.lmax,
                kappas: a.kappa.clone(),
                abs_lambdas: a.abs_lambda.clone(),
                phase: a.phase,
                quick: a.quick,
            }
        }
        Cmd::Bounds { kappa, abs_lambda } => Command::Bounds {
            kappas: kappa.clone(),
            abs_lambdas: abs_lambda.clone(),
        },
        Cmd::Run { spec } => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", spec.display())))?;
            return RunSpec::from_text(&text).map_err(Failure::Usage);
        }
    };
    Ok(RunSpec {
        schema: SCHEMA,
        command,
        format: cli.format,
        seed: cli.seed,
        threads: cli.threads,
        budget: cli.budget,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let result = match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure::Runtime(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = to_spec(&cli).and_then(|spec| {
        if cli.emit_spec {
            return emit(&cli.out, &(spec.to_text() + "\n")).map(|_| true);
        }
        if let Some(n) = spec.threads {
            vmdgap::exec::set_threads(n.max(1));
        }
        let report = run::execute(&spec)?;
        emit(&cli.out, &report.text)?;
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("vmdgap: {f}");
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_lists() {
        assert_eq!(parse_lens("7..10").unwrap(), vec![7, 8, 9, 10]);
        assert_eq!(parse_lens("7..=8").unwrap(), vec![7, 8]);
        assert_eq!(parse_lens("5, 9").unwrap(), vec![5, 9]);
        assert!(parse_lens("9..7").is_err());
        assert!(parse_lens("a").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
