//! `kleinx`: command-line front end for the Klein-bottle verification toolkit.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinx_core::systems::SystemForm;

use crate::commands::{GeometryTask, MeshFormat, SweepArgs};
use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

const CONFIG_ENV: &str = "KLEINX_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "kleinx", version, about = "Numerical checks for the extremal Klein-bottle metric")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the run configuration.
#[derive(Debug, Args)]
struct GlobalArgs {
    /// Configuration file (`key = value` lines); falls back to $KLEINX_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    event_tol: Option<f64>,
    #[arg(long, global = true)]
    y_max: Option<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Format for tabular output (csv or json).
    #[arg(long = "output-format", global = true)]
    output_format: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SystemArg {
    Full,
    Syst12,
    Syst01,
}

impl From<SystemArg> for SystemForm {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Full => SystemForm::Full,
            SystemArg::Syst12 => SystemForm::Syst12,
            SystemArg::Syst01 => SystemForm::Syst01,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshArg {
    Csv,
    Obj,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every acceptance criterion and print a pass/fail table.
    Verify {
        #[arg(long)]
        json: bool,
    },
    /// Integrate the system from the initial state with parameter p.
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        /// End of the integration interval (default: two periods).
        #[arg(long)]
        y_end: Option<f64>,
        #[arg(long, value_enum, default_value = "full")]
        system: SystemArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep cot α over a grid of shooting parameters.
    Sweep {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evidence that √3/2 < p < 1 gives no admissible solution.
    RuleOut {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structure checks for 0 < p < √3/2.
    IntervalCheck {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodic spectra of the three Fourier channels and the multiplicity of λ = 1.
    Sturm {
        /// Report only this channel.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the immersion into S⁴.
    Embed {
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: MeshArg,
        /// Coordinates (1-based) kept in the OBJ projection.
        #[arg(long, default_value = "1,2,4", value_parser = commands::parse_projection)]
        projection: [usize; 3],
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lawson tori, bipolar metrics and the metric identity.
    Geometry {
        #[command(flatten)]
        task: GeometryArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(name = "specfun-selftest", hide = true)]
    SpecfunSelftest,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct GeometryArgs {
    #[arg(long)]
    check_identity: bool,
    #[arg(long, num_args = 2, value_names = ["M", "K"])]
    lawson: Option<Vec<u32>>,
    #[arg(long, num_args = 2, value_names = ["M", "K"])]
    bipolar: Option<Vec<u32>>,
}

impl GeometryArgs {
    fn task(&self) -> GeometryTask {
        match (&self.lawson, &self.bipolar) {
            (Some(v), _) => GeometryTask::Lawson(v[0], v[1]),
            (_, Some(v)) => GeometryTask::Bipolar(v[0], v[1]),
            _ => GeometryTask::CheckIdentity,
        }
    }
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let path = g.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = g.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = g.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = g.event_tol {
        cfg.event_tol = v;
    }
    if let Some(v) = g.y_max {
        cfg.y_max = v;
    }
    if let Some(v) = g.workers {
        cfg.workers = v;
    }
    if let Some(v) = &g.output_dir {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = &g.output_format {
        cfg.format = v.parse::<OutputFormat>().map_err(CliError::Usage)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Verify { json } => commands::verify(&cfg, json),
        Command::Solve { p, y_end, system, out } => commands::solve(&cfg, p, y_end, system.into(), out.as_ref()),
        Command::Sweep { steps, p_min, p_max, out } => commands::sweep(
            &cfg,
            SweepArgs {
                steps,
                p_min,
                p_max,
                out,
            },
        ),
        Command::RuleOut { p, out } => commands::rule_out(&cfg, p, out.as_ref()),
        Command::IntervalCheck { p, out } => commands::interval_check(&cfg, p, out.as_ref()),
        Command::Sturm { k, n, count, out } => commands::sturm(&cfg, k, n, count, out.as_ref()),
        Command::Embed {
            nx,
            ny,
            format,
            projection,
            out,
        } => {
            let format = match format {
                MeshArg::Csv => MeshFormat::Csv,
                MeshArg::Obj => MeshFormat::Obj,
            };
            commands::embed(&cfg, nx, ny, format, projection, out.as_ref())
        }
        Command::Geometry { task, out } => commands::geometry(&cfg, task.task(), out.as_ref()),
        Command::SpecfunSelftest => commands::specfun_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kleinx: {e}");
            e.exit_code()
        }
    }
}
