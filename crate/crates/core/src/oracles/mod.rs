//! Numerical references for the analytic propagator: direct integration of
//! the master equation and trajectory averaging over sampled noise.

pub mod montecarlo;
pub mod noise;
pub mod ode;

pub use montecarlo::{evolve_montecarlo, evolve_montecarlo_at, McEstimate, McSettings};
pub use noise::{sample_ou_path, NoisePath, OuProcess};
pub use ode::{evolve_ode, evolve_ode_curve, evolve_ode_dense, OdeSettings, OdeSolution};
