use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical parameters of the coupled-qubit model.
///
/// Times are measured in units of `1 / damping`; `coupling` is in the same
/// units as `damping`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Dipole-dipole coupling strength J.
    pub coupling: f64,
    /// Damping rate Γ of each qubit.
    pub damping: f64,
    /// Noise bandwidth γ, the inverse correlation time of the noise.
    pub bandwidth: f64,
}

impl ModelParams {
    pub fn new(coupling: f64, damping: f64, bandwidth: f64) -> Result<Self> {
        let params = ModelParams {
            coupling,
            damping,
            bandwidth,
        };
        params.validate()?;
        Ok(params)
    }

    /// Convenience constructor with Γ = 1, the unit used throughout the CLI.
    pub fn with_ratio(coupling: f64, bandwidth_ratio: f64) -> Result<Self> {
        Self::new(coupling, 1.0, bandwidth_ratio)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping.is_finite() && self.damping > 0.0) {
            return Err(Error::validation(
                "damping",
                format!("must be > 0, got {}", self.damping),
            ));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::validation(
                "bandwidth",
                format!("must be > 0, got {}", self.bandwidth),
            ));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::validation(
                "coupling",
                format!("must be >= 0, got {}", self.coupling),
            ));
        }
        Ok(())
    }

    pub fn bandwidth_ratio(&self) -> f64 {
        self.bandwidth / self.damping
    }

    pub fn spectral(&self) -> SpectralParams {
        SpectralParams::new(self)
    }
}

/// The ε-derived exponents and hypergeometric parameters.
///
/// Always complex: ε = sqrt(Γ² − 64J²) is real below 8J = Γ and purely
/// imaginary above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub epsilon: Complex64,
    pub kappa_plus: Complex64,
    pub kappa_minus: Complex64,
    pub delta_plus: Complex64,
    pub delta_minus: Complex64,
    pub eta_plus: Complex64,
    pub eta_minus: Complex64,
}

impl SpectralParams {
    pub fn new(params: &ModelParams) -> Self {
        let big = params.damping;
        let small = params.bandwidth;
        let j2 = params.coupling * params.coupling;
        let epsilon = Complex64::new(big * big - 64.0 * j2, 0.0).sqrt();

        let eta_plus = (big + epsilon) / (2.0 * small);
        // Γ − ε = 64J² / (Γ + ε); the direct difference cancels catastrophically
        // for small J. Re ε ≥ 0 so the denominator never vanishes.
        let eta_minus = 64.0 * j2 / ((big + epsilon) * 2.0 * small);

        SpectralParams {
            epsilon,
            kappa_plus: 1.0 + eta_plus,
            kappa_minus: 1.0 + eta_minus,
            delta_plus: 2.0 + eta_plus,
            delta_minus: 2.0 + eta_minus,
            eta_plus,
            eta_minus,
        }
    }

    /// ε/γ, the shift in the `b` parameters 1 ± ε/γ and 2 ± ε/γ.
    pub fn eps_over_gamma(&self, params: &ModelParams) -> Complex64 {
        self.epsilon / params.bandwidth
    }
}
