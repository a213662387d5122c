//! Noise correlation, memory kernel and the confluent hypergeometric
//! function used by the closed-form propagator.

mod dd;
mod hyp1f1;

pub use hyp1f1::{hyp1f1, HYP1F1_RTOL, MAX_TERMS, POLE_TOL};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Parameters of the Ornstein-Uhlenbeck correlation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub damping: f64,
    pub bandwidth: f64,
}

impl KernelParams {
    pub fn new(damping: f64, bandwidth: f64) -> Result<Self> {
        if !(damping.is_finite() && damping > 0.0) {
            return Err(Error::validation("damping", format!("must be > 0, got {damping}")));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::validation("bandwidth", format!("must be > 0, got {bandwidth}")));
        }
        Ok(KernelParams { damping, bandwidth })
    }
}

impl From<&ModelParams> for KernelParams {
    fn from(p: &ModelParams) -> Self {
        KernelParams {
            damping: p.damping,
            bandwidth: p.bandwidth,
        }
    }
}

/// Noise autocorrelation (Γγ/2) e^{−γ|Δt|}.
pub fn correlation_alpha(params: KernelParams, dt: f64) -> f64 {
    0.5 * params.damping * params.bandwidth * (-params.bandwidth * dt.abs()).exp()
}

/// Memory kernel G(t) = (Γ/2)(1 − e^{−γt}).
pub fn kernel_g(params: KernelParams, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(-0.5 * params.damping * (-params.bandwidth * t).exp_m1())
}

/// f(t) = ∫₀ᵗ G(s) ds = (Γ/2)(t + (e^{−γt} − 1)/γ).
pub fn decay_f(params: KernelParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let x = params.bandwidth * t;
    Ok(0.5 * params.damping * x_plus_expm1_neg(x) / params.bandwidth)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// x + (e^{−x} − 1) without cancellation for small x.
fn x_plus_expm1_neg(x: f64) -> f64 {
    if x > 0.1 {
        return x + (-x).exp_m1();
    }
    // x²/2! − x³/3! + x⁴/4! − …
    let mut term = x * x / 2.0;
    let mut sum = 0.0f64;
    let mut n = 2.0;
    while term.abs() > 1e-18 * sum.abs() && n < 40.0 {
        sum += term;
        n += 1.0;
        term *= -x / n;
    }
    sum
}
