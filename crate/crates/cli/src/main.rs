//! `ahcenter`: charges, center of mass, CMC leaves and center evolution of
//! asymptotically hyperbolic model data.

mod config;
mod error;
mod pipelines;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::BoolishValueParser;
use clap::{ArgAction, Parser, Subcommand};
use log::{error, info};

use crate::config::{Config, Pipeline};
use crate::error::{CliError, ErrorReport};
use crate::pipelines::Context;
use crate::report::{Output, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "ahcenter", version, about = "Hyperbolic center of mass of asymptotically hyperbolic data")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// TOML experiment file; defaults apply when omitted.
    #[arg(long, env = "AHCENTER_CONFIG", global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, env = "AHCENTER_OUT", global = true)]
    out: Option<PathBuf>,
    /// Turn decay-contract violations into errors.
    #[arg(long, env = "AHCENTER_STRICT_DECAY", action = ArgAction::SetTrue, value_parser = BoolishValueParser::new(), global = true)]
    strict_decay: bool,
    /// Quadrature bandlimit for charges and CMC leaves.
    #[arg(long, env = "AHCENTER_BANDLIMIT", global = true)]
    bandlimit: Option<usize>,
    /// Radius ladder of the charges, comma separated.
    #[arg(long, env = "AHCENTER_LADDER", value_delimiter = ',', global = true)]
    ladder: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Hamiltonian charges, mass vector and momenta.
    Charges,
    /// Center of mass, with the boost cross-check when the model is boosted.
    Center,
    /// CMC foliation and the limit of leaf centers (n = 3).
    Cmc,
    /// Evolution of the center under the linearized flow.
    Evolve,
    /// Every pipeline in turn.
    All,
}

impl From<Command> for Pipeline {
    fn from(c: Command) -> Self {
        match c {
            Command::Charges => Pipeline::Charges,
            Command::Center => Pipeline::Center,
            Command::Cmc => Pipeline::Cmc,
            Command::Evolve => Pipeline::Evolve,
            Command::All => Pipeline::All,
        }
    }
}

fn configure(cli: &Cli) -> Result<Config, CliError> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(dir) = &cli.out {
        config.output.dir = dir.clone();
    }
    if cli.strict_decay {
        config.strict_decay = true;
    }
    if let Some(l) = cli.bandlimit {
        config.charges.bandlimit = l;
        config.cmc.bandlimit = l;
    }
    if let Some(ladder) = &cli.ladder {
        config.charges.ladder = ladder.clone();
    }
    Ok(config)
}

fn run(ctx: &Context, pipeline: Pipeline) -> Result<(), CliError> {
    match pipeline {
        Pipeline::Charges => pipelines::run_charges(ctx),
        Pipeline::Center => pipelines::run_center(ctx),
        Pipeline::Cmc => pipelines::run_cmc(ctx),
        Pipeline::Evolve => pipelines::run_evolve(ctx),
        Pipeline::All => {
            pipelines::run_charges(ctx)?;
            pipelines::run_center(ctx)?;
            if ctx.data.dim() == 3 {
                pipelines::run_cmc(ctx)?;
            } else {
                info!("cmc: skipped, leaves are only constructed for n = 3");
            }
            pipelines::run_evolve(ctx)
        }
    }
}

fn report_error(e: &CliError, out: Option<&Output>) {
    let record =
        ErrorReport { schema_version: SCHEMA_VERSION, kind: e.kind(), exit_code: e.exit_code(), message: e.to_string() };
    error!("{e}");
    if let Some(out) = out {
        if let Err(w) = out.json("error", &record) {
            error!("{w}");
        }
    }
    eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| e.to_string()));
}

fn execute(cli: &Cli) -> Result<(), (CliError, Option<Output>)> {
    let config = configure(cli).map_err(|e| (e, None))?;
    let pipeline = cli.command.map(Pipeline::from).or(config.pipeline).unwrap_or(Pipeline::All);
    let out = Output::new(&config.output.dir, &config.output.formats).map_err(|e| (e, None))?;
    let ctx = Context::new(config, out.clone()).map_err(|e| (e, Some(out.clone())))?;
    run(&ctx, pipeline).map_err(|e| (e, Some(out.clone())))?;
    info!("outputs written to {}", out.dir().display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AHCENTER_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((e, out)) => {
            report_error(&e, out.as_ref());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
