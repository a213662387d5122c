//! Adaptive Dormand–Prince 5(4) integration of the master equation.
//!
//! The density matrix is carried as its 16 real Hermitian degrees of
//! freedom: the four real populations followed by the real and imaginary
//! parts of the six upper-triangle coherences. Hermiticity therefore holds
//! by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::{CMatrix4, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in units of 1/Γ.
    pub max_step: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.01,
        }
    }
}

impl OdeSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rel_tol) {
            return Err(Error::validation("rel_tol", "must be positive"));
        }
        if !ok(self.abs_tol) {
            return Err(Error::validation("abs_tol", "must be positive"));
        }
        if !ok(self.max_step) {
            return Err(Error::validation("max_step", "must be positive"));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    // Fifth-order weights; the seventh stage doubles as f at the new point.
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 50_000_000;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Fourth-order interpolant; exact at both ends of the step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.r;
        std::array::from_fn(|i| r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i]))))
    }
}

/// Explicit Dormand–Prince pair with step-size control on a fixed-size
/// real system `y' = f(t, y)`.
pub struct Dopri5<const N: usize, F> {
    rhs: F,
    settings: OdeSettings,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], settings: OdeSettings) -> Result<Self> {
        settings.validate()?;
        let mut k1 = [0.0; N];
        rhs(t0, &y0, &mut k1);
        let h = initial_step(&y0, &k1, &settings);
        Ok(Dopri5 {
            rhs,
            settings,
            t: t0,
            y: y0,
            k1,
            h,
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Takes one accepted step that does not pass `t_stop` and returns its
    /// dense-output segment.
    pub fn step(&mut self, t_stop: f64) -> Result<DenseSegment<N>> {
        let mut fac_max = FAC_MAX;
        loop {
            let remaining = t_stop - self.t;
            // Stretch by a hair rather than leave a sliver before t_stop.
            let clipped = self.h * (1.0 + 1e-8) >= remaining;
            let h = if clipped { remaining } else { self.h };
            if !(h > 1e-14 * self.t.abs().max(1.0)) || self.accepted + self.rejected >= MAX_STEPS {
                return Err(Error::IntegrationFailure { t: self.t, step: h });
            }

            let mut k = [[0.0; N]; 7];
            k[0] = self.k1;
            let mut stage = [0.0; N];
            for s in 1..7 {
                for i in 0..N {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    stage[i] = self.y[i] + h * acc;
                }
                (self.rhs)(self.t + C[s] * h, &stage, &mut k[s]);
            }
            // The last stage was evaluated at the fifth-order solution.
            let y_new = stage;

            let mut err_sq = 0.0;
            let mut finite = true;
            for i in 0..N {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let sc = self.settings.abs_tol + self.settings.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let q = h * e / sc;
                err_sq += q * q;
                finite &= y_new[i].is_finite();
            }
            let err = (err_sq / N as f64).sqrt();
            if !finite || !err.is_finite() {
                self.rejected += 1;
                self.h = h * FAC_MIN;
                fac_max = 1.0;
                continue;
            }

            let fac = if err == 0.0 {
                fac_max
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, fac_max)
            };
            if err <= 1.0 {
                let mut r = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y_new[i] - self.y[i];
                    let bspl = h * k[0][i] - dy;
                    let mut dsum = 0.0;
                    for (s, ks) in k.iter().enumerate() {
                        dsum += D[s] * ks[i];
                    }
                    r[0][i] = self.y[i];
                    r[1][i] = dy;
                    r[2][i] = bspl;
                    r[3][i] = dy - h * k[6][i] - bspl;
                    r[4][i] = h * dsum;
                }
                let segment = DenseSegment { t0: self.t, h, r };
                self.t = if clipped { t_stop } else { self.t + h };
                self.y = y_new;
                self.k1 = k[6];
                self.accepted += 1;
                // A step shortened to land on t_stop says nothing about the
                // size the controller would have chosen.
                let proposed = (h * fac).min(self.settings.max_step);
                if !clipped || proposed < self.h {
                    self.h = proposed;
                }
                return Ok(segment);
            }
            self.rejected += 1;
            self.h = h * fac;
            fac_max = 1.0;
        }
    }
}

fn initial_step<const N: usize>(y0: &[f64; N], f0: &[f64; N], settings: &OdeSettings) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = settings.abs_tol + settings.rel_tol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(settings.max_step)
}

// Upper-triangle coherence positions, in storage order.
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Number of real degrees of freedom of a 4×4 Hermitian matrix.
pub const HERMITIAN_DIM: usize = 16;

pub fn pack(rho: &CMatrix4) -> [f64; HERMITIAN_DIM] {
    let mut y = [0.0; HERMITIAN_DIM];
    for i in 0..4 {
        y[i] = rho[(i, i)].re;
    }
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        y[4 + 2 * p] = rho[(i, j)].re;
        y[5 + 2 * p] = rho[(i, j)].im;
    }
    y
}

pub fn unpack(y: &[f64; HERMITIAN_DIM]) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    for i in 0..4 {
        m[(i, i)] = Complex64::new(y[i], 0.0);
    }
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        let z = Complex64::new(y[4 + 2 * p], y[5 + 2 * p]);
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    }
    m
}

/// Right-hand side of the master equation in packed form.
pub fn master_rhs(params: &ModelParams, t: f64, y: &[f64; HERMITIAN_DIM], dy: &mut [f64; HERMITIAN_DIM]) {
    let j2 = 2.0 * params.coupling;
    let g = 0.5 * params.damping * -(-params.bandwidth * t).exp_m1();
    let c = |p: usize| Complex64::new(y[4 + 2 * p], y[5 + 2 * p]);
    let (r12, r13, r14, r23, r24, r34) = (c(0), c(1), c(2), c(3), c(4), c(5));
    let ij = Complex64::new(0.0, j2);

    let d22 = -2.0 * j2 * r23.im;
    let out = [
        ij * r13 - g * r12,
        ij * r12 - g * r13,
        -2.0 * g * r14,
        ij * (y[1] - y[2]) - 2.0 * g * r23,
        -ij * r34 - g * r24,
        -ij * r24 - g * r34,
    ];
    dy[0] = 0.0;
    dy[1] = d22;
    dy[2] = -d22;
    dy[3] = 0.0;
    for (p, z) in out.iter().enumerate() {
        dy[4 + 2 * p] = z.re;
        dy[5 + 2 * p] = z.im;
    }
}

fn check_inputs(params: &ModelParams, settings: &OdeSettings, times: &[f64]) -> Result<()> {
    params.validate()?;
    settings.validate()?;
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "output times must be finite, nonnegative and nondecreasing (got {t} after {prev})"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// Integrates from t = 0 to each of `times` (ascending), landing a step
/// exactly on every output time.
pub fn evolve_ode_curve(
    rho0: &DensityMatrix,
    params: &ModelParams,
    times: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<DensityMatrix>> {
    check_inputs(params, settings, times)?;
    let p = *params;
    let mut solver = Dopri5::new(
        move |t, y: &[f64; HERMITIAN_DIM], dy: &mut [f64; HERMITIAN_DIM]| master_rhs(&p, t, y, dy),
        0.0,
        pack(rho0.elements()),
        *settings,
    )?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while solver.t() < t {
            solver.step(t)?;
        }
        out.push(DensityMatrix::new_unchecked(unpack(solver.y())));
    }
    Ok(out)
}

pub fn evolve_ode(
    rho0: &DensityMatrix,
    params: &ModelParams,
    t_end: f64,
    settings: &OdeSettings,
) -> Result<DensityMatrix> {
    Ok(evolve_ode_curve(rho0, params, &[t_end], settings)?[0])
}

/// Piecewise continuous solution on [0, t_end].
#[derive(Debug, Clone)]
pub struct OdeSolution {
    segments: Vec<DenseSegment<HERMITIAN_DIM>>,
    rho0: DensityMatrix,
}

impl OdeSolution {
    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t1())
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Dense-output value at any t in [0, t_end].
    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        if !(t >= 0.0 && t <= self.t_end()) {
            if t == 0.0 {
                return Ok(self.rho0);
            }
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.t_end())));
        }
        let idx = self.segments.partition_point(|s| s.t1() < t);
        match self.segments.get(idx) {
            Some(seg) => Ok(DensityMatrix::new_unchecked(unpack(&seg.eval(t)))),
            None => Ok(self.rho0),
        }
    }
}

pub fn evolve_ode_dense(
    rho0: &DensityMatrix,
    params: &ModelParams,
    t_end: f64,
    settings: &OdeSettings,
) -> Result<OdeSolution> {
    check_inputs(params, settings, &[t_end])?;
    let p = *params;
    let mut solver = Dopri5::new(
        move |t, y: &[f64; HERMITIAN_DIM], dy: &mut [f64; HERMITIAN_DIM]| master_rhs(&p, t, y, dy),
        0.0,
        pack(rho0.elements()),
        *settings,
    )?;
    let mut segments = Vec::new();
    while solver.t() < t_end {
        segments.push(solver.step(t_end)?);
    }
    Ok(OdeSolution { segments, rho0: *rho0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{decay_f, KernelParams};
    use crate::state::{build_ewl, embed, EwlSpec, Family};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn settings() -> OdeSettings {
        OdeSettings::default()
    }

    #[test]
    fn harmonic_oscillator() {
        let mut solver = Dopri5::new(
            |_t, y: &[f64; 2], dy: &mut [f64; 2]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            [1.0, 0.0],
            OdeSettings {
                max_step: 1.0,
                ..settings()
            },
        )
        .unwrap();
        let mut segs = Vec::new();
        while solver.t() < 10.0 {
            segs.push(solver.step(10.0).unwrap());
        }
        assert_eq!(solver.t(), 10.0);
        assert!((solver.y()[0] - 10f64.cos()).abs() < 1e-9);
        assert!((solver.y()[1] + 10f64.sin()).abs() < 1e-9);
        for seg in &segs {
            let tm = seg.t0 + 0.37 * seg.h;
            let v = seg.eval(tm);
            assert!((v[0] - tm.cos()).abs() < 1e-8, "dense at {tm}");
        }
    }

    #[test]
    fn exponential_decay_hits_target_exactly() {
        let mut solver = Dopri5::new(
            |_t, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0],
            0.0,
            [1.0],
            settings(),
        )
        .unwrap();
        while solver.t() < 3.0 {
            solver.step(3.0).unwrap();
        }
        assert_eq!(solver.t(), 3.0);
        assert!((solver.y()[0] / (-3.0f64).exp() - 1.0).abs() < 1e-10);
        assert_eq!(solver.rejected, 0);
    }

    #[test]
    fn blow_up_is_reported() {
        let mut solver = Dopri5::new(
            |_t, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0] * y[0],
            0.0,
            [1.0],
            OdeSettings {
                max_step: 1.0,
                ..settings()
            },
        )
        .unwrap();
        let mut res = Ok(());
        while solver.t() < 2.0 && res.is_ok() {
            res = solver.step(2.0).map(|_| ());
        }
        match res {
            Err(Error::IntegrationFailure { t, .. }) => assert!(t < 1.0 && t > 0.99),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn pack_round_trip() {
        let x = build_ewl(EwlSpec::new(Family::Phi, 0.7, 0.3).unwrap()).unwrap();
        let mut m = embed(&x).into_inner();
        m[(0, 1)] = Complex64::new(0.01, -0.02);
        m[(1, 0)] = m[(0, 1)].conj();
        assert_eq!(unpack(&pack(&m)), m);
    }

    #[test]
    fn zero_time_is_identity() {
        let rho = embed(&build_ewl(EwlSpec::new(Family::Phi, 0.95, 1.0).unwrap()).unwrap());
        let p = ModelParams::with_ratio(0.4, 0.1).unwrap();
        assert_eq!(evolve_ode(&rho, &p, 0.0, &settings()).unwrap(), rho);
    }

    #[test]
    fn bell_state_coherence_matches_closed_form() {
        let rho = embed(&build_ewl(EwlSpec::new(Family::Phi, 0.95, FRAC_1_SQRT_2).unwrap()).unwrap());
        let p = ModelParams::with_ratio(0.5, 0.1).unwrap();
        let out = evolve_ode(&rho, &p, 2.0, &settings()).unwrap();
        let f = decay_f(KernelParams::from(&p), 2.0).unwrap();
        let want = 0.475 * (-2.0 * f).exp();
        assert!((out.get(1, 2).re - want).abs() < 1e-12);
        assert!((out.get(1, 2).re - 0.393_864_630_659_238_6).abs() < 1e-12);
    }

    #[test]
    fn dense_solution_matches_stepped_curve() {
        let rho = embed(&build_ewl(EwlSpec::new(Family::Phi, 0.95, 1.0).unwrap()).unwrap());
        let p = ModelParams::with_ratio(0.4, 0.1).unwrap();
        let sol = evolve_ode_dense(&rho, &p, 5.0, &settings()).unwrap();
        let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1 + 0.003).filter(|&t| t <= 5.0).collect();
        let curve = evolve_ode_curve(&rho, &p, &times, &settings()).unwrap();
        for (t, m) in times.iter().zip(&curve) {
            assert!(sol.at(*t).unwrap().max_abs_diff(m) < 1e-10, "t={t}");
        }
        assert!(sol.at(5.1).is_err());
    }

    #[test]
    fn unsorted_times_are_rejected() {
        let rho = DensityMatrix::maximally_mixed();
        let p = ModelParams::with_ratio(0.4, 0.1).unwrap();
        assert!(matches!(
            evolve_ode_curve(&rho, &p, &[1.0, 0.5], &settings()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evolve_ode_curve(&rho, &p, &[-1.0], &settings()),
            Err(Error::Domain(_))
        ));
    }
}
