//! `phgen`: derive pseudo-Hermitian potentials, verify the intertwining
//! relation on a grid and compute spectra.
//!
//! Exit codes: 0 all checks pass (or none requested), 1 a check failed,
//! 2 bad input, 3 the model cannot be evaluated on the grid, 4 the
//! eigensolver did not converge.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phgen_core::{Error, ErrorKind, ParamEnv, Result};

use commands::{Output, Status};
use config::{parse_param, parse_sweep, Command, Format, MatrixInputs, RawInputs, RunConfig};

#[derive(Parser)]
#[command(name = "phgen", version, about = "Generators of eta-weak-pseudo-Hermitian Hamiltonians")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G, Q, V, W and V + iW on the grid.
    Derive(ModelArgs),
    /// Intertwining and Hermiticity residuals of the discretized H and eta.
    Verify(VerifyArgs),
    /// Eigenvalues of the discretized H, filtered and matched to known levels.
    Spectrum(SpectrumArgs),
    /// Built-in models.
    Catalog {
        #[command(subcommand)]
        command: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Names, parameters and formulas of all models.
    List,
    /// Full entry of one model with its parameters bound.
    Show {
        name: String,
        #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Catalog model: scarf2, periodic, morse, constant_w.
    #[arg(long)]
    model: Option<String>,
    /// Inline imaginary potential W(x).
    #[arg(long = "W", value_name = "EXPR", allow_hyphen_values = true)]
    w: Option<String>,
    /// Closed-form antiderivative of W; without it W is integrated numerically.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    antideriv: Option<String>,
    /// Parameter binding, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param, allow_hyphen_values = true)]
    params: Vec<(String, f64)>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Numeric antiderivative: anchor point (default 0).
    #[arg(long, allow_hyphen_values = true)]
    anchor: Option<f64>,
    /// Numeric antiderivative: value of the integral at the anchor (default 0).
    #[arg(long, allow_hyphen_values = true)]
    anchor_value: Option<f64>,
    /// Left end of the grid.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Right end of the grid.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Number of interior grid points.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-run the configuration embedded in a previous report (or a bare config).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["model", "w", "antideriv", "params", "alpha", "beta", "anchor", "anchor_value", "a", "b", "n", "format", "out"])]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    tol_intertwine: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tol_hermitian: Option<f64>,
    /// Hamiltonian matrix as CSV (needs --eta-csv); skips the model.
    #[arg(long, requires = "eta_csv")]
    h_csv: Option<PathBuf>,
    #[arg(long, requires = "h_csv")]
    eta_csv: Option<PathBuf>,
    /// Also write the matrices as H.csv and eta.csv into this directory.
    #[arg(long, value_name = "DIR")]
    dump_matrices: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    tol_level: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tol_real: Option<f64>,
    /// Continuum threshold for the bound-state filter.
    #[arg(long, allow_hyphen_values = true)]
    v_inf: Option<f64>,
    /// Scan one parameter, e.g. A=1,2,4; solves run in parallel.
    #[arg(long, value_name = "NAME=V1,V2,...", value_parser = parse_sweep)]
    sweep: Option<config::Sweep>,
}

impl ModelArgs {
    fn raw(self) -> RawInputs {
        RawInputs {
            model: self.model,
            w: self.w,
            antideriv: self.antideriv,
            params: self.params,
            alpha: self.alpha,
            beta: self.beta,
            anchor: self.anchor,
            anchor_value: self.anchor_value,
            a: self.a,
            b: self.b,
            n: self.n,
            format: self.format,
            out: self.out,
            ..RawInputs::default()
        }
    }
}

fn load_or_resolve(config: Option<PathBuf>, command: Command, raw: RawInputs) -> Result<RunConfig> {
    match config {
        Some(path) => {
            if raw != RawInputs::default() {
                return Err(Error::InvalidArgument("--config cannot be combined with other run options".into()));
            }
            let cfg = RunConfig::from_json(&std::fs::read_to_string(path)?)?;
            if cfg.command != command {
                return Err(Error::InvalidArgument(format!(
                    "config is for `{:?}`, not `{command:?}`",
                    cfg.command
                )));
            }
            Ok(cfg)
        }
        None => RunConfig::resolve(command, raw),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn finish(cfg: &RunConfig, output: Output) -> Result<Status> {
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&output.json).expect("json") + "\n",
        Format::Csv => {
            let config = serde_json::to_string(&cfg).expect("json");
            format!("# config: {config}\n{}", output.csv)
        }
    };
    emit(&text, cfg.out.as_ref())?;
    Ok(output.status)
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Cmd::Derive(args) => {
            let cfg = load_or_resolve(args.config.clone(), Command::Derive, args.raw())?;
            finish(&cfg, commands::run_derive(&cfg)?)
        }
        Cmd::Verify(args) => {
            let config = args.model.config.clone();
            let mut raw = args.model.raw();
            raw.tol_intertwine = args.tol_intertwine;
            raw.tol_hermitian = args.tol_hermitian;
            raw.matrices = args.h_csv.zip(args.eta_csv).map(|(h, eta)| MatrixInputs { h, eta });
            raw.dump_matrices = args.dump_matrices;
            let cfg = load_or_resolve(config, Command::Verify, raw)?;
            finish(&cfg, commands::run_verify(&cfg)?)
        }
        Cmd::Spectrum(args) => {
            let config = args.model.config.clone();
            let mut raw = args.model.raw();
            raw.tol_level = args.tol_level;
            raw.tol_real = args.tol_real;
            raw.v_inf = args.v_inf;
            raw.sweep = args.sweep;
            let cfg = load_or_resolve(config, Command::Spectrum, raw)?;
            finish(&cfg, commands::run_spectrum(&cfg)?)
        }
        Cmd::Catalog { command } => {
            let value = match command {
                CatalogCmd::List => commands::catalog_list(),
                CatalogCmd::Show { name, params } => {
                    let env: ParamEnv = params.into_iter().collect();
                    commands::catalog_show(&name, &env)?
                }
            };
            emit(&(serde_json::to_string_pretty(&value).expect("json") + "\n"), None)?;
            Ok(Status::None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Spec | ErrorKind::Io => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Solver => 4,
            })
        }
    }
}
