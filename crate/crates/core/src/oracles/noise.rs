//! Ornstein–Uhlenbeck frequency noise with exact discretization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Stationary OU process with variance Γγ/2 and correlation time 1/γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuProcess {
    pub damping: f64,
    pub bandwidth: f64,
}

impl OuProcess {
    pub fn new(params: &ModelParams) -> Self {
        OuProcess {
            damping: params.damping,
            bandwidth: params.bandwidth,
        }
    }

    pub fn stationary_variance(&self) -> f64 {
        0.5 * self.damping * self.bandwidth
    }

    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xi: f64 = rng.sample(StandardNormal);
        self.stationary_variance().sqrt() * xi
    }

    /// Exact transition over an interval of length `dt`.
    pub fn transition(&self, dt: f64) -> OuTransition {
        let decay = (-self.bandwidth * dt).exp();
        let var = self.stationary_variance() * -(-2.0 * self.bandwidth * dt).exp_m1();
        OuTransition {
            decay,
            spread: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuTransition {
    pub decay: f64,
    pub spread: f64,
}

impl OuTransition {
    #[inline]
    pub fn apply(&self, omega: f64, xi: f64) -> f64 {
        omega * self.decay + self.spread * xi
    }

    pub fn step<R: Rng + ?Sized>(&self, omega: f64, rng: &mut R) -> f64 {
        self.apply(omega, rng.sample(StandardNormal))
    }
}

/// Random stream for one noise channel of one trajectory. Channel A of
/// trajectory `index` uses stream `2·index`, channel B uses `2·index + 1`.
pub fn channel_rng(seed: u64, index: u64, channel: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index + channel as u64);
    rng
}

/// Sampled values of (Ω_A, Ω_B) on the grid tᵢ = i·dt.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub dt: f64,
    pub omega_a: Vec<f64>,
    pub omega_b: Vec<f64>,
}

impl NoisePath {
    /// Identically zero noise, mainly for testing the propagator.
    pub fn zeros(dt: f64, steps: usize) -> Self {
        NoisePath {
            dt,
            omega_a: vec![0.0; steps + 1],
            omega_b: vec![0.0; steps + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.omega_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_a.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }
}

pub(crate) fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::validation("dt", "must be positive"));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("t_end = {t_end} must be finite and nonnegative")));
    }
    // Tolerate t_end values that are a few ulps off a grid multiple.
    Ok((t_end / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Samples both channels on a uniform grid covering [0, t_end]. Each channel
/// starts from the stationary distribution and draws from its own stream,
/// so paths for different `index` values are independent and reproducible.
pub fn sample_ou_path(params: &ModelParams, t_end: f64, dt: f64, seed: u64, index: u64) -> Result<NoisePath> {
    params.validate()?;
    let steps = step_count(t_end, dt)?;
    let ou = OuProcess::new(params);
    let tr = ou.transition(dt);
    let channel = |c: usize| {
        let mut rng = channel_rng(seed, index, c);
        let mut omega = ou.sample_stationary(&mut rng);
        let mut out = Vec::with_capacity(steps + 1);
        out.push(omega);
        for _ in 0..steps {
            omega = tr.step(omega, &mut rng);
            out.push(omega);
        }
        out
    };
    let omega_a = channel(0);
    let omega_b = channel(1);
    Ok(NoisePath { dt, omega_a, omega_b })
}
