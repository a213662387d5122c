//! Command-line arguments and their resolution against a config file.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use ouqubits_core::{Engine, EngineOptions, Family, McSettings};

use crate::config::ConfigFile;
use crate::range::parse_values;

/// Smallest bandwidth ratio accepted by the sweep commands.
pub const MIN_GAMMA_RATIO: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 10.0;
pub const DEFAULT_N_POINTS: usize = 1000;
pub const OUT_DIR_ENV: &str = "OUQUBITS_OUT_DIR";

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// State family: phi (α|10⟩ + β|01⟩) or psi (α|11⟩ + β|00⟩).
    #[arg(long)]
    pub family: Option<String>,
    /// Purity r of the Werner-like mixture.
    #[arg(long)]
    pub r: Option<String>,
    /// Amplitude α of the pure component.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Dipole coupling J in units of Γ.
    #[arg(short = 'J', long = "coupling")]
    pub coupling: Option<String>,
    /// Noise bandwidth γ/Γ.
    #[arg(long)]
    pub gamma_ratio: Option<String>,
    /// End of the time grid in units of 1/Γ.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of samples on [0, t_max].
    #[arg(long)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EngineArgs {
    /// analytic, ode or montecarlo.
    #[arg(long)]
    pub engine: Option<String>,
    /// Integrate the master equation where the closed form is degenerate.
    #[arg(long)]
    pub fallback_ode: bool,
    /// Seed for the Monte-Carlo engine.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trajectories for the Monte-Carlo engine.
    #[arg(long)]
    pub n_traj: Option<usize>,
    /// Monte-Carlo time step.
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Fully resolved parameters of a sweep. Every field holding a `Vec` is a
/// set of values; `evolve` requires each to have exactly one element.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub coupling: Vec<f64>,
    pub gamma_ratio: Vec<f64>,
    pub t_max: f64,
    pub n_points: usize,
    pub engine: Engine,
    pub options: EngineOptions,
}

fn values(cfg: &ConfigFile, flag: Option<&str>, key: &str, flag_name: &str) -> Result<Vec<f64>> {
    let text = cfg
        .merge_str(flag, key)
        .ok_or_else(|| anyhow!("missing {key}: pass --{flag_name} or set {key} in the config file"))?;
    parse_values(&text).with_context(|| format!("parsing {key}"))
}

pub fn resolve_engine(cfg: &ConfigFile, args: &EngineArgs) -> Result<(Engine, EngineOptions)> {
    let engine: Engine = match cfg.merge_str(args.engine.as_deref(), "engine") {
        Some(s) => s.parse()?,
        None => Engine::Analytic,
    };
    let fallback_ode = args.fallback_ode || cfg.get::<bool>("fallback_ode")?.unwrap_or(false);
    let defaults = McSettings::default();
    let mc = McSettings {
        n_traj: cfg.merge(args.n_traj, "n_traj")?.unwrap_or(defaults.n_traj),
        dt: cfg.merge(args.dt, "dt")?.unwrap_or(defaults.dt),
        seed: cfg.merge(args.seed, "seed")?.unwrap_or(defaults.seed),
    };
    mc.validate()?;
    Ok((
        engine,
        EngineOptions {
            fallback_ode,
            mc,
            ..Default::default()
        },
    ))
}

impl SweepConfig {
    pub fn resolve(cfg: &ConfigFile, point: &PointArgs, engine: &EngineArgs) -> Result<Self> {
        let family: Family = cfg
            .merge_str(point.family.as_deref(), "family")
            .ok_or_else(|| anyhow!("missing family: pass --family or set family in the config file"))?
            .parse()?;
        let (engine, options) = resolve_engine(cfg, engine)?;
        let sweep = SweepConfig {
            family,
            r: values(cfg, point.r.as_deref(), "r", "r")?,
            alpha: values(cfg, point.alpha.as_deref(), "alpha", "alpha")?,
            coupling: values(cfg, point.coupling.as_deref(), "J", "coupling")?,
            gamma_ratio: values(cfg, point.gamma_ratio.as_deref(), "gamma_ratio", "gamma-ratio")?,
            t_max: cfg.merge(point.t_max, "t_max")?.unwrap_or(DEFAULT_T_MAX),
            n_points: cfg.merge(point.n_points, "n_points")?.unwrap_or(DEFAULT_N_POINTS),
            engine,
            options,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", &self.r),
            ("alpha", &self.alpha),
            ("J", &self.coupling),
            ("gamma_ratio", &self.gamma_ratio),
        ] {
            if v.is_empty() {
                bail!("{name} has no values");
            }
        }
        if let Some(g) = self.gamma_ratio.iter().find(|&&g| !(g >= MIN_GAMMA_RATIO)) {
            bail!("gamma_ratio = {g} is below the supported minimum {MIN_GAMMA_RATIO}");
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            bail!("t_max must be positive, got {}", self.t_max);
        }
        if self.n_points < 2 {
            bail!("n_points must be at least 2, got {}", self.n_points);
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.r.len() * self.alpha.len() * self.coupling.len() * self.gamma_ratio.len()
    }
}

/// Output directory: flag, then config file, then the environment, then
/// the working directory.
pub fn resolve_out_dir(cfg: &ConfigFile, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.raw("out_dir").map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
