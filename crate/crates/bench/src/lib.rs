//! Fixtures shared by the benchmarks.

use ouqubits_core::{build_ewl, embed, DensityMatrix, EwlSpec, Family, ModelParams};

/// The Bell-like Φ state with slight mixing.
pub fn bell_state() -> DensityMatrix {
    embed(&build_ewl(EwlSpec::new(Family::Phi, 0.95, std::f64::consts::FRAC_1_SQRT_2).unwrap()).unwrap())
}

/// Coupled, non-Markovian parameters typical of the figures.
pub fn figure_params() -> ModelParams {
    ModelParams::with_ratio(0.4, 0.1).unwrap()
}
