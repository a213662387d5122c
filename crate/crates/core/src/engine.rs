//! Selection between the three propagators for whole time curves.

use nalgebra::Matrix4;

use crate::analytic::AnalyticPropagator;
use crate::error::{Error, Result};
use crate::measures::MeasureSample;
use crate::oracles::{evolve_montecarlo_at, evolve_ode_curve, McSettings, OdeSettings};
use crate::params::ModelParams;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Analytic,
    Ode,
    MonteCarlo,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Engine::Analytic),
            "ode" => Ok(Engine::Ode),
            "montecarlo" | "mc" => Ok(Engine::MonteCarlo),
            other => Err(Error::Validation {
                field: "engine",
                reason: format!("unknown engine {other:?} (expected analytic, ode or montecarlo)"),
            }),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Ode => "ode",
            Engine::MonteCarlo => "montecarlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineOptions {
    /// Integrate the master equation when the closed form is degenerate.
    pub fallback_ode: bool,
    pub ode: OdeSettings,
    pub mc: McSettings,
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Elementwise standard errors, Monte-Carlo only.
    pub std_err: Option<Vec<Matrix4<f64>>>,
    /// The engine that produced the states, after any fallback.
    pub engine: Engine,
}

impl Curve {
    pub fn measures(&self) -> Result<Vec<MeasureSample>> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, rho)| MeasureSample::from_density(t, rho))
            .collect()
    }
}

/// `n` equally spaced times from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}

fn analytic_curve(rho0: &DensityMatrix, params: &ModelParams, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let prop = AnalyticPropagator::new(rho0, params)?;
    times.iter().map(|&t| prop.at(t)).collect()
}

/// Evolves `rho0` to every time in `times` (ascending) with the chosen
/// engine. With `fallback_ode`, a degenerate closed form is replaced by
/// the integrator and the switch is logged.
pub fn evolve_curve(
    rho0: &DensityMatrix,
    params: &ModelParams,
    times: &[f64],
    engine: Engine,
    options: &EngineOptions,
) -> Result<Curve> {
    let ode = |times: &[f64]| evolve_ode_curve(rho0, params, times, &options.ode);
    let (states, std_err, used) = match engine {
        Engine::Analytic => match analytic_curve(rho0, params, times) {
            Ok(states) => (states, None, Engine::Analytic),
            Err(e) if e.is_degenerate() && options.fallback_ode => {
                log::warn!(
                    "closed form unavailable at J = {}, γ/Γ = {} ({e}); integrating instead",
                    params.coupling,
                    params.bandwidth_ratio()
                );
                (ode(times)?, None, Engine::Ode)
            }
            Err(e) => return Err(e),
        },
        Engine::Ode => (ode(times)?, None, Engine::Ode),
        Engine::MonteCarlo => {
            let est = evolve_montecarlo_at(rho0, params, times, &options.mc)?;
            let std_err = est.iter().map(|e| e.std_err).collect();
            (
                est.into_iter().map(|e| e.mean).collect(),
                Some(std_err),
                Engine::MonteCarlo,
            )
        }
    };
    Ok(Curve {
        times: times.to_vec(),
        states,
        std_err,
        engine: used,
    })
}
