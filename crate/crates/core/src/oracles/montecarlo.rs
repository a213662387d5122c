//! Ensemble average of stochastic Schrödinger trajectories.
//!
//! Each trajectory evolves under the Hamiltonian with the sampled
//! frequencies Ω_A(t), Ω_B(t) on the diagonal and the exchange coupling 2J
//! between |10⟩ and |01⟩. One step of length h is the symmetric product
//!
//! ```text
//! Z(Ω(t + h), h/2) · X(J, h) · Z(Ω(t), h/2)
//! ```
//!
//! where Z applies the diagonal phases and X the exact exchange rotation,
//! so every step is exactly unitary. Mixed initial states are propagated as
//! their eigen-ensemble under a shared noise path.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::noise::{channel_rng, step_count, NoisePath, OuProcess, OuTransition};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::{CMatrix4, DensityMatrix};

pub type Ket = [Complex64; 4];

/// Trajectories per reduction block. The ensemble sum is formed block by
/// block in index order, so results do not depend on thread scheduling.
pub const BLOCK: usize = 256;

// Mixture components with smaller weight are dropped.
const WEIGHT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n_traj: usize,
    /// Trajectory step in units of 1/Γ.
    pub dt: f64,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            n_traj: 20_000,
            dt: 1e-3,
            seed: 0,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::validation("n_traj", "must be at least 1"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::validation("dt", "must be positive"));
        }
        Ok(())
    }
}

/// Ensemble mean with elementwise standard errors at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub t: f64,
    pub mean: DensityMatrix,
    /// √((Var Re + Var Im)/n) for each element.
    pub std_err: Matrix4<f64>,
    pub n_traj: usize,
}

impl McEstimate {
    pub fn max_std_err(&self) -> f64 {
        self.std_err.max()
    }
}

#[inline]
fn z_half(psi: &mut Ket, h: f64, omega_a: f64, omega_b: f64) {
    let (s0, c0) = (0.25 * h * (omega_a + omega_b)).sin_cos();
    let (s1, c1) = (0.25 * h * (omega_a - omega_b)).sin_cos();
    let p0 = Complex64::new(c0, -s0);
    let p1 = Complex64::new(c1, -s1);
    psi[0] *= p0;
    psi[1] *= p1;
    psi[2] *= p1.conj();
    psi[3] *= p0.conj();
}

#[inline]
fn exchange(psi: &mut Ket, c: f64, s: f64) {
    let (a, b) = (psi[1], psi[2]);
    let mis = Complex64::new(0.0, -s);
    psi[1] = a * c + mis * b;
    psi[2] = mis * a + b * c;
}

/// One symmetric split step from t to t + h.
#[inline]
pub fn strang_step(psi: &mut Ket, coupling: f64, h: f64, omega_start: (f64, f64), omega_end: (f64, f64)) {
    let (s, c) = (2.0 * coupling * h).sin_cos();
    z_half(psi, h, omega_start.0, omega_start.1);
    exchange(psi, c, s);
    z_half(psi, h, omega_end.0, omega_end.1);
}

pub fn ket_norm(psi: &Ket) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Propagates a state vector along a given noise path, calling `observe`
/// with the step index and state after every step (index 0 is the input).
pub fn propagate_path(psi0: Ket, coupling: f64, path: &NoisePath, mut observe: impl FnMut(usize, &Ket)) -> Ket {
    let mut psi = psi0;
    observe(0, &psi);
    for i in 1..path.len() {
        strang_step(
            &mut psi,
            coupling,
            path.dt,
            (path.omega_a[i - 1], path.omega_b[i - 1]),
            (path.omega_a[i], path.omega_b[i]),
        );
        observe(i, &psi);
    }
    psi
}

/// Step boundaries: the uniform grid i·dt with every record time inserted.
/// Returns the boundaries and, for each record time, the boundary index.
fn schedule(times: &[f64], dt: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let t_max = times.last().copied().unwrap_or(0.0);
    let steps = step_count(t_max, dt)?;
    let mut points = Vec::with_capacity(steps + times.len() + 1);
    let mut marks = Vec::with_capacity(times.len());
    let mut next = times.iter().copied().peekable();
    points.push(0.0);
    for i in 1..=steps + 1 {
        let g = (i as f64 * dt).min(t_max);
        while let Some(&t) = next.peek() {
            if t > g + 1e-9 * dt {
                break;
            }
            let last = *points.last().unwrap();
            if t > last + 1e-9 * dt {
                points.push(t);
            }
            marks.push(points.len() - 1);
            next.next();
        }
        let last = *points.last().unwrap();
        if g > last + 1e-9 * dt && g < t_max {
            points.push(g);
        }
        if next.peek().is_none() {
            break;
        }
    }
    Ok((points, marks))
}

struct Mixture {
    weights: Vec<f64>,
    kets: Vec<Ket>,
}

fn decompose(rho0: &DensityMatrix) -> Result<Mixture> {
    let (w, v) = rho0.clipped_spectrum()?;
    let mut weights = Vec::new();
    let mut kets = Vec::new();
    for k in 0..4 {
        if w[k] > WEIGHT_CUTOFF {
            weights.push(w[k]);
            kets.push(std::array::from_fn(|i| v[(i, k)]));
        }
    }
    Ok(Mixture { weights, kets })
}

fn mixture_density(mix: &Mixture, kets: &[Ket]) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    for (w, psi) in mix.weights.iter().zip(kets) {
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] += psi[i] * psi[j].conj() * *w;
            }
        }
    }
    m
}

struct NoiseStepper {
    rng_a: ChaCha8Rng,
    rng_b: ChaCha8Rng,
    omega: (f64, f64),
    uniform: OuTransition,
    dt: f64,
    ou: OuProcess,
}

impl NoiseStepper {
    fn new(params: &ModelParams, seed: u64, index: u64, dt: f64) -> Self {
        let ou = OuProcess::new(params);
        let mut rng_a = channel_rng(seed, index, 0);
        let mut rng_b = channel_rng(seed, index, 1);
        let omega = (ou.sample_stationary(&mut rng_a), ou.sample_stationary(&mut rng_b));
        NoiseStepper {
            rng_a,
            rng_b,
            omega,
            uniform: ou.transition(dt),
            dt,
            ou,
        }
    }

    fn advance(&mut self, h: f64) -> (f64, f64) {
        let tr = if (h - self.dt).abs() <= 1e-12 * self.dt {
            self.uniform
        } else {
            self.ou.transition(h)
        };
        self.omega = (
            tr.step(self.omega.0, &mut self.rng_a),
            tr.step(self.omega.1, &mut self.rng_b),
        );
        self.omega
    }
}

#[derive(Clone)]
struct Moments {
    sum: Vec<CMatrix4>,
    sq: Vec<Matrix4<f64>>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Moments {
            sum: vec![CMatrix4::zeros(); n],
            sq: vec![Matrix4::zeros(); n],
        }
    }

    fn add_sample(&mut self, slot: usize, m: &CMatrix4) {
        self.sum[slot] += m;
        self.sq[slot] += m.map(|z| z.norm_sqr());
    }

    fn merge(&mut self, other: &Moments) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sq.iter_mut().zip(&other.sq) {
            *a += b;
        }
    }
}

fn run_trajectory(
    mix: &Mixture,
    params: &ModelParams,
    settings: &McSettings,
    index: u64,
    points: &[f64],
    marks: &[usize],
    acc: &mut Moments,
) {
    let mut kets = mix.kets.clone();
    let mut noise = NoiseStepper::new(params, settings.seed, index, settings.dt);
    let mut mark = 0;
    let record = |step: usize, kets: &[Ket], acc: &mut Moments, mark: &mut usize| {
        while *mark < marks.len() && marks[*mark] == step {
            acc.add_sample(*mark, &mixture_density(mix, kets));
            *mark += 1;
        }
    };
    record(0, &kets, acc, &mut mark);
    for s in 1..points.len() {
        let h = points[s] - points[s - 1];
        let start = noise.omega;
        let end = noise.advance(h);
        for psi in kets.iter_mut() {
            strang_step(psi, params.coupling, h, start, end);
        }
        record(s, &kets, acc, &mut mark);
    }
}

/// Monte-Carlo estimates of the density matrix at each of `times`
/// (ascending, nonnegative).
pub fn evolve_montecarlo_at(
    rho0: &DensityMatrix,
    params: &ModelParams,
    times: &[f64],
    settings: &McSettings,
) -> Result<Vec<McEstimate>> {
    params.validate()?;
    settings.validate()?;
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "record times must be finite, nonnegative and nondecreasing (got {t} after {prev})"
            )));
        }
        prev = t;
    }
    let mix = decompose(rho0)?;
    let (points, marks) = schedule(times, settings.dt)?;
    debug_assert_eq!(marks.len(), times.len());

    let n = settings.n_traj;
    let blocks = n.div_ceil(BLOCK);
    let partial: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments::new(times.len());
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                run_trajectory(&mix, params, settings, i as u64, &points, &marks, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = Moments::new(times.len());
    for p in &partial {
        total.merge(p);
    }

    let nf = n as f64;
    Ok(times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mean = total.sum[k] / Complex64::new(nf, 0.0);
            let std_err = if n > 1 {
                let var = (total.sq[k] / nf - mean.map(|z| z.norm_sqr())).map(|v| v.max(0.0)) * (nf / (nf - 1.0));
                var.map(|v| (v / nf).sqrt())
            } else {
                Matrix4::zeros()
            };
            McEstimate {
                t,
                mean: DensityMatrix::new_unchecked(mean),
                std_err,
                n_traj: n,
            }
        })
        .collect())
}

pub fn evolve_montecarlo(
    rho0: &DensityMatrix,
    params: &ModelParams,
    t_end: f64,
    settings: &McSettings,
) -> Result<McEstimate> {
    Ok(evolve_montecarlo_at(rho0, params, &[t_end], settings)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::noise::sample_ou_path;
    use crate::state::{build_ewl, embed, EwlSpec, Family};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn schedule_inserts_record_times() {
        let (p, m) = schedule(&[0.0, 0.25, 0.3, 0.3, 1.0], 0.1).unwrap();
        assert_eq!(p.len(), 12);
        assert!((p[3] - 0.25).abs() < 1e-15 && (p[4] - 0.3).abs() < 1e-15);
        assert_eq!(m, vec![0, 3, 4, 4, 11]);
        assert_eq!(*p.last().unwrap(), 1.0);
        for w in p.windows(2) {
            assert!(w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15);
        }
        let (p, m) = schedule(&[0.0], 0.1).unwrap();
        assert_eq!((p, m), (vec![0.0], vec![0]));
    }

    #[test]
    fn free_evolution_without_noise_is_identity() {
        let psi = [c(0.0), c(0.6), c(0.8), c(0.0)];
        let path = NoisePath::zeros(1e-3, 1000);
        let out = propagate_path(psi, 0.0, &path, |_, _| {});
        assert_eq!(out, psi);
    }

    #[test]
    fn steps_are_unitary() {
        let p = ModelParams::with_ratio(0.5, 0.1).unwrap();
        let path = sample_ou_path(&p, 5.0, 1e-3, 1, 0).unwrap();
        let psi = [
            c(0.5),
            Complex64::new(0.1, 0.4),
            c(-0.5),
            Complex64::new(0.0, 0.574_456_264_653_802_9),
        ];
        let n0 = ket_norm(&psi);
        propagate_path(psi, p.coupling, &path, |_, s| assert!((ket_norm(s) - n0).abs() < 1e-12));
    }

    #[test]
    fn exchange_matches_exact_rotation() {
        // Without noise, |10⟩ → cos(2Jt)|10⟩ − i sin(2Jt)|01⟩.
        let j = 0.4;
        let path = NoisePath::zeros(0.01, 300);
        let out = propagate_path([c(0.0), c(1.0), c(0.0), c(0.0)], j, &path, |_, _| {});
        let t = path.t_end();
        assert!((out[1] - c((2.0 * j * t).cos())).norm() < 1e-12);
        assert!((out[2] - Complex64::new(0.0, -(2.0 * j * t).sin())).norm() < 1e-12);
    }

    #[test]
    fn single_trajectory_is_deterministic() {
        let p = ModelParams::with_ratio(0.5, 0.1).unwrap();
        let rho = embed(&build_ewl(EwlSpec::new(Family::Phi, 0.8, 0.6).unwrap()).unwrap());
        let s = McSettings {
            n_traj: 3,
            dt: 0.01,
            seed: 9,
        };
        let a = evolve_montecarlo_at(&rho, &p, &[0.5, 1.0], &s).unwrap();
        let b = evolve_montecarlo_at(&rho, &p, &[0.5, 1.0], &s).unwrap();
        assert_eq!(a, b);
        for e in &a {
            assert!((e.mean.trace() - 1.0).norm() < 1e-12);
            assert!(e.mean.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn uniform_schedule_reuses_sampled_path() {
        // The ensemble sees exactly the path sample_ou_path returns.
        let p = ModelParams::with_ratio(0.3, 0.5).unwrap();
        let psi = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let rho = DensityMatrix::from_pure(&nalgebra::Vector4::from(psi)).unwrap();
        let s = McSettings {
            n_traj: 1,
            dt: 0.01,
            seed: 4,
        };
        let est = evolve_montecarlo(&rho, &p, 1.0, &s).unwrap();
        let path = sample_ou_path(&p, 1.0, 0.01, 4, 0).unwrap();
        let out = propagate_path(psi, p.coupling, &path, |_, _| {});
        assert!((est.mean.get(1, 1).re - out[1].norm_sqr()).abs() < 1e-12);
        assert!((est.mean.get(1, 2) - out[1] * out[2].conj()).norm() < 1e-12);
    }

    #[test]
    fn psi_bell_state_coherence() {
        let p = ModelParams::with_ratio(0.5, 0.1).unwrap();
        let rho = embed(&build_ewl(EwlSpec::new(Family::Psi, 1.0, FRAC_1_SQRT_2).unwrap()).unwrap());
        let s = McSettings {
            n_traj: 20_000,
            ..McSettings::default()
        };
        let est = evolve_montecarlo(&rho, &p, 1.0, &s).unwrap();
        let want = 0.476_388_604_925_285_6;
        let got = est.mean.get(0, 3).re;
        let se = est.std_err[(0, 3)];
        assert!((got - want).abs() < 3.0 * se, "{got} vs {want}, se {se}");
    }
}
