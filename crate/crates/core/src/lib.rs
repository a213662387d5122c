//! Two dipole-coupled qubits under independent Ornstein–Uhlenbeck frequency
//! noise.
//!
//! The closed-form propagator lives in [`analytic`]. The integrators in
//! [`oracles`] solve the same problem independently, either from the
//! master equation or by averaging noisy trajectories. [`measures`] turns
//! states into concurrence and CHSH values.
//!
//! All matrices use the basis |11⟩, |10⟩, |01⟩, |00⟩, in that order.

pub mod analytic;
pub mod engine;
pub mod error;
pub mod measures;
pub mod oracles;
pub mod params;
pub mod specfun;
pub mod state;

pub use analytic::{
    cb_phi_bell_closed, cb_psi_closed, evolve_analytic, evolve_analytic_j0, AnalyticCoefficients, AnalyticPropagator,
};
pub use engine::{evolve_curve, time_grid, Curve, Engine, EngineOptions};
pub use error::{Error, Result};
pub use measures::{
    bell_max_horodecki, bell_max_x, bell_numeric_max, bell_value, concurrence_general, concurrence_x, BellAngles,
    MeasureSample,
};
pub use oracles::{
    evolve_montecarlo, evolve_montecarlo_at, evolve_ode, evolve_ode_curve, sample_ou_path, McEstimate, McSettings,
    NoisePath, OdeSettings,
};
pub use params::{ModelParams, SpectralParams};
pub use state::{build_ewl, embed, project_x, DensityMatrix, EwlSpec, Family, XState, BASIS_LABELS};
