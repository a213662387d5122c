use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ouqubits_cli::args::{
    resolve_engine, resolve_out_dir, EngineArgs, PointArgs, SweepConfig, DEFAULT_N_POINTS, DEFAULT_T_MAX,
};
use ouqubits_cli::config::ConfigFile;
use ouqubits_cli::figures::{write_figure, FigureId};
use ouqubits_cli::noise::{write_paths, SampleRequest};
use ouqubits_cli::sweep::{write_evolve, write_sweep};
use ouqubits_cli::verify::{self, Level, VerifyOptions};

/// Two dipole-coupled qubits under Ornstein-Uhlenbeck frequency noise.
///
/// Times are in units of 1/Γ and J is in units of Γ. Settings can also be
/// given in a key = value file passed with --config; flags take precedence.
#[derive(Parser)]
#[command(name = "ouqubits", version)]
struct Cli {
    /// Config file with key = value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density matrix, concurrence and Bell maximum along one curve.
    Evolve {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output file (standard output if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Concurrence and Bmax - 2 over a parameter grid.
    ///
    /// Values may be lists (0,0.4,0.8) or grids (start:stop:count, with a
    /// trailing :log for logarithmic spacing).
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Data files for one figure (1a, 1b, 1c, 2, 3, 4 or 5).
    Figure {
        id: FigureId,
        /// Directory for the CSV files; defaults to $OUQUBITS_OUT_DIR, then
        /// the working directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        n_points: Option<usize>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Cross-check the propagators and the published claims.
    Verify {
        #[arg(default_value = "quick")]
        level: Level,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_traj: Option<usize>,
    },
    /// Dump Ornstein-Uhlenbeck noise paths.
    McSample {
        #[arg(long)]
        gamma_ratio: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        n_paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Evolve { point, engine, output } => {
            let sweep = SweepConfig::resolve(&cfg, &point, &engine)?;
            write_evolve(&sweep, open_output(output.as_deref())?)?;
        }
        Command::Sweep { point, engine, output } => {
            let sweep = SweepConfig::resolve(&cfg, &point, &engine)?;
            write_sweep(&sweep, open_output(output.as_deref())?)?;
        }
        Command::Figure {
            id,
            out_dir,
            t_max,
            n_points,
            engine,
        } => {
            let (engine, mut options) = resolve_engine(&cfg, &engine)?;
            // Small bandwidth ratios on the figure 2 axis exceed the range
            // where the series can be summed accurately.
            options.fallback_ode = true;
            let dir = resolve_out_dir(&cfg, out_dir);
            let t_max = cfg.merge(t_max, "t_max")?.unwrap_or(DEFAULT_T_MAX);
            let n_points = cfg.merge(n_points, "n_points")?.unwrap_or(DEFAULT_N_POINTS);
            for path in write_figure(id, &dir, t_max, n_points, engine, &options)? {
                println!("{}", path.display());
            }
        }
        Command::Verify { level, seed, n_traj } => {
            let defaults = VerifyOptions::default();
            let opts = VerifyOptions {
                seed: cfg.merge(seed, "seed")?.unwrap_or(defaults.seed),
                n_traj: cfg.merge(n_traj, "n_traj")?.unwrap_or(defaults.n_traj),
                dt: cfg.get("dt")?.unwrap_or(defaults.dt),
            };
            let checks = verify::run(level, &opts, |c| {
                println!("{c}");
                log::info!("check {} took {:.1} s", c.id, c.elapsed.as_secs_f64());
            });
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            return Ok(failed == 0);
        }
        Command::McSample {
            gamma_ratio,
            t_max,
            dt,
            n_paths,
            seed,
            output,
        } => {
            let req = SampleRequest {
                gamma_ratio: cfg
                    .merge(gamma_ratio, "gamma_ratio")?
                    .context("missing gamma_ratio: pass --gamma-ratio or set it in the config file")?,
                t_max: cfg.merge(t_max, "t_max")?.unwrap_or(DEFAULT_T_MAX),
                dt: cfg.merge(dt, "dt")?.unwrap_or(1e-2),
                n_paths: cfg.merge(n_paths, "n_paths")?.unwrap_or(100),
                seed: cfg.merge(seed, "seed")?.unwrap_or(0),
            };
            write_paths(&req, open_output(output.as_deref())?)?;
        }
    }
    Ok(true)
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
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
