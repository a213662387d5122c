//! Entanglement and Bell-nonlocality functionals.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{project_x, CMatrix4, DensityMatrix, XState, PSD_CLIP};

/// Largest imaginary part or negative real part tolerated in the spectrum
/// of ρ·ρ̃ before the input is reported as numerically degraded.
pub const SPECTRUM_HEALTH_TOL: f64 = 1e-8;

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix2::new(z, one, one, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(one, z, z, -one),
    ]
}

// The Pauli z eigenvalue +1 belongs to |1⟩ here: the basis starts at |11⟩.
fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> CMatrix4 {
    CMatrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn sigma_yy() -> CMatrix4 {
    let p = pauli();
    kron(&p[1], &p[1])
}

/// Wootters concurrence from the spectrum of ρ·(σy⊗σy)ρ*(σy⊗σy).
///
/// The square roots √λᵢ are taken as the singular values of √ρ·(σy⊗σy)·√ρ*,
/// which is better conditioned than square-rooting eigenvalues of the
/// product. The eigenvalues of the product itself are still computed as a
/// health check.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<f64> {
    let (w, v) = rho.clipped_spectrum()?;
    let sqrt_rho = v * CMatrix4::from_diagonal(&w.map(|x| c(x.sqrt(), 0.0))) * v.adjoint();
    let yy = sigma_yy();

    let m = rho.elements();
    let product = m * yy * m.conjugate() * yy;
    let eig = product
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::NumericDegradation("Schur form did not converge".into()))?;
    for l in eig.iter() {
        if l.im.abs() > SPECTRUM_HEALTH_TOL || l.re < -SPECTRUM_HEALTH_TOL {
            return Err(Error::NumericDegradation(format!(
                "eigenvalue {l} of the spin-flipped product is not real and nonnegative"
            )));
        }
    }

    let mut s: Vec<f64> = (sqrt_rho * yy * sqrt_rho.conjugate())
        .singular_values()
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

pub fn concurrence_x(x: &XState) -> f64 {
    let a = x.rho23.norm() - (x.rho11.max(0.0) * x.rho44.max(0.0)).sqrt();
    let b = x.rho14.norm() - (x.rho22.max(0.0) * x.rho33.max(0.0)).sqrt();
    (2.0 * a.max(b).max(0.0)).min(1.0)
}

/// Closed-form CHSH maximum of an X state, returned with
/// P = ρ11 + ρ44 − ρ22 − ρ33 and Q = 2(|ρ14| + |ρ23|).
///
/// The correlation matrix of an X state has singular values |P|, Q and
/// Q' = 2·||ρ14| − |ρ23||, so the maximum is 2√(Q² + max(P², Q'²)). When
/// Q' ≤ |P|, as for every evolved Werner-like state, this is 2√(P² + Q²).
pub fn bell_max_x(x: &XState) -> (f64, f64, f64) {
    let p = x.rho11 + x.rho44 - x.rho22 - x.rho33;
    let (a, b) = (x.rho14.norm(), x.rho23.norm());
    let q = 2.0 * (a + b);
    let q_prime = 2.0 * (a - b).abs();
    let bmax = 2.0 * (q * q + (p * p).max(q_prime * q_prime)).sqrt();
    (bmax, p, q)
}

/// T_ij = Tr(ρ σᵢ⊗σⱼ).
pub fn correlation_matrix(rho: &DensityMatrix) -> Matrix3<f64> {
    let s = pauli();
    let m = rho.elements();
    Matrix3::from_fn(|i, j| (m * kron(&s[i], &s[j])).trace().re)
}

pub fn bell_max_horodecki(rho: &DensityMatrix) -> f64 {
    let t = correlation_matrix(rho);
    let mut u: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    2.0 * (u[0] + u[1]).max(0.0).sqrt()
}

/// Measurement directions for the CHSH combination. Each observable
/// O = sinθ cosφ σx + sinθ sinφ σy + cosθ σz has its own azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellAngles {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
    pub phi_a: f64,
    pub phi_a_prime: f64,
    pub phi_b: f64,
    pub phi_b_prime: f64,
}

impl BellAngles {
    /// Settings where O and O′ on the same side share one azimuth.
    pub fn shared_azimuth(
        theta_a: f64,
        theta_a_prime: f64,
        theta_b: f64,
        theta_b_prime: f64,
        phi_a: f64,
        phi_b: f64,
    ) -> Self {
        BellAngles {
            theta_a,
            theta_a_prime,
            theta_b,
            theta_b_prime,
            phi_a,
            phi_a_prime: phi_a,
            phi_b,
            phi_b_prime: phi_b,
        }
    }

    /// The textbook optimum for a maximally entangled state.
    pub fn canonical() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self::shared_azimuth(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4, 0.0, 0.0)
    }

    fn from_array(x: &[f64; 8]) -> Self {
        BellAngles {
            theta_a: x[0],
            theta_a_prime: x[1],
            theta_b: x[2],
            theta_b_prime: x[3],
            phi_a: x[4],
            phi_a_prime: x[5],
            phi_b: x[6],
            phi_b_prime: x[7],
        }
    }

    pub fn directions(&self) -> [Vector3<f64>; 4] {
        [
            direction(self.theta_a, self.phi_a),
            direction(self.theta_a_prime, self.phi_a_prime),
            direction(self.theta_b, self.phi_b),
            direction(self.theta_b_prime, self.phi_b_prime),
        ]
    }

    /// Same observables with θ ∈ [0, π] and φ ∈ [0, 2π).
    pub fn normalized(&self) -> Self {
        let d = self.directions();
        let (ta, pa) = spherical(&d[0]);
        let (tap, pap) = spherical(&d[1]);
        let (tb, pb) = spherical(&d[2]);
        let (tbp, pbp) = spherical(&d[3]);
        BellAngles::from_array(&[ta, tap, tb, tbp, pa, pap, pb, pbp])
    }
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

fn spherical(n: &Vector3<f64>) -> (f64, f64) {
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = n.y.atan2(n.x).rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly 2π.
    (theta, if phi >= std::f64::consts::TAU { 0.0 } else { phi })
}

fn observable(n: &Vector3<f64>) -> Matrix2<Complex64> {
    let s = pauli();
    s[0] * c(n.x, 0.0) + s[1] * c(n.y, 0.0) + s[2] * c(n.z, 0.0)
}

fn chsh(e_ab: f64, e_abp: f64, e_apb: f64, e_apbp: f64) -> f64 {
    (e_ab - e_abp).abs() + e_apb + e_apbp
}

/// |⟨O_A O_B⟩ − ⟨O_A O′_B⟩| + ⟨O′_A O_B⟩ + ⟨O′_A O′_B⟩ with ⟨X⟩ = Tr(ρX).
pub fn bell_value(rho: &DensityMatrix, angles: &BellAngles) -> f64 {
    let [a, ap, b, bp] = angles.directions().map(|n| observable(&n));
    let m = rho.elements();
    let e = |x: &Matrix2<Complex64>, y: &Matrix2<Complex64>| (m * kron(x, y)).trace().re;
    chsh(e(&a, &b), e(&a, &bp), e(&ap, &b), e(&ap, &bp))
}

/// Number of local searches in [`bell_numeric_max`].
pub const NUMERIC_STARTS: usize = 16;
/// Objective evaluations allowed per local search.
pub const NUMERIC_BUDGET: usize = 2000;

/// Maximizes [`bell_value`] over all measurement directions by
/// Nelder–Mead searches started from rotated copies of the canonical
/// setting.
pub fn bell_numeric_max(rho: &DensityMatrix) -> (f64, BellAngles) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let t = correlation_matrix(rho);
    let objective = |x: &[f64; 8]| {
        let d = BellAngles::from_array(x).directions();
        let e = |u: &Vector3<f64>, v: &Vector3<f64>| (u.transpose() * t * v)[(0, 0)];
        chsh(e(&d[0], &d[2]), e(&d[0], &d[3]), e(&d[1], &d[2]), e(&d[1], &d[3]))
    };

    let mut best = (f64::NEG_INFINITY, [0.0; 8]);
    for k in 0..NUMERIC_STARTS {
        let g = (k % 8) as f64 * PI / 8.0;
        let phi = if k < 8 { 0.0 } else { FRAC_PI_2 };
        let start = [g, g + FRAC_PI_2, g + FRAC_PI_4, g + 3.0 * FRAC_PI_4, phi, phi, phi, phi];
        let (x, v) = nelder_mead_max(&objective, start, 0.4, NUMERIC_BUDGET);
        if v > best.0 {
            best = (v, x);
        }
    }
    (best.0, BellAngles::from_array(&best.1).normalized())
}

/// Derivative-free maximization. Restarts from the current best point with
/// a fresh simplex whenever the simplex collapses, until the budget runs
/// out or a restart brings no improvement.
fn nelder_mead_max<const N: usize>(
    f: &impl Fn(&[f64; N]) -> f64,
    x0: [f64; N],
    scale: f64,
    budget: usize,
) -> ([f64; N], f64) {
    let mut evals = 0;
    let eval = |x: &[f64; N], evals: &mut usize| {
        *evals += 1;
        -f(x)
    };
    let mut best_x = x0;
    let mut best_v = eval(&x0, &mut evals);
    let mut step = scale;
    while evals < budget {
        let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
        simplex.push((best_x, best_v));
        for i in 0..N {
            let mut x = best_x;
            x[i] += step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[N].1 - simplex[0].1;
            if evals >= budget || spread <= 1e-15 * (1.0 + simplex[0].1.abs()) {
                break;
            }
            let mut centroid = [0.0; N];
            for (x, _) in &simplex[..N] {
                for i in 0..N {
                    centroid[i] += x[i] / N as f64;
                }
            }
            let worst = simplex[N];
            let along = |t: f64| -> [f64; N] { std::array::from_fn(|i| centroid[i] + t * (worst.0[i] - centroid[i])) };
            let xr = along(-1.0);
            let vr = eval(&xr, &mut evals);
            if vr < simplex[0].1 {
                let xe = along(-2.0);
                let ve = eval(&xe, &mut evals);
                simplex[N] = if ve < vr { (xe, ve) } else { (xr, vr) };
            } else if vr < simplex[N - 1].1 {
                simplex[N] = (xr, vr);
            } else {
                let (xc, vc) = if vr < worst.1 {
                    let x = along(-0.5);
                    (x, eval(&x, &mut evals))
                } else {
                    let x = along(0.5);
                    (x, eval(&x, &mut evals))
                };
                if vc < worst.1.min(vr) {
                    simplex[N] = (xc, vc);
                } else {
                    let x0 = simplex[0].0;
                    for (x, v) in simplex.iter_mut().skip(1) {
                        *x = std::array::from_fn(|i| x0[i] + 0.5 * (x[i] - x0[i]));
                        *v = eval(x, &mut evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_v - 1e-15;
        best_x = simplex[0].0;
        best_v = best_v.min(simplex[0].1);
        if !improved && step < scale {
            break;
        }
        step = (step * 0.1).max(1e-6);
    }
    (best_x, -best_v)
}

/// One point of a concurrence/Bell curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSample {
    pub t: f64,
    pub concurrence: f64,
    pub bmax: f64,
    pub p: f64,
    pub q: f64,
}

/// Magnitude below which entries outside the X pattern are treated as
/// zero when choosing the closed-form measures.
pub const X_PATTERN_TOL: f64 = 1e-12;

impl MeasureSample {
    pub fn from_x(t: f64, x: &XState) -> Self {
        let (bmax, p, q) = bell_max_x(x);
        MeasureSample {
            t,
            concurrence: concurrence_x(x),
            bmax,
            p,
            q,
        }
    }

    /// Uses the X-state closed forms when `rho` has X shape and the general
    /// routes otherwise. P and Q are read from the X entries either way.
    pub fn from_density(t: f64, rho: &DensityMatrix) -> Result<Self> {
        if rho.min_eigenvalue() < -PSD_CLIP {
            return Err(Error::NotPositive {
                min_eigenvalue: rho.min_eigenvalue(),
            });
        }
        match project_x(rho, X_PATTERN_TOL) {
            Ok(x) => Ok(Self::from_x(t, &x)),
            Err(_) => {
                let m = rho.elements();
                let p = (m[(0, 0)] + m[(3, 3)] - m[(1, 1)] - m[(2, 2)]).re;
                let q = 2.0 * (m[(0, 3)].norm() + m[(1, 2)].norm());
                Ok(MeasureSample {
                    t,
                    concurrence: concurrence_general(rho)?,
                    bmax: bell_max_horodecki(rho),
                    p,
                    q,
                })
            }
        }
    }

    pub fn violates_chsh(&self) -> bool {
        self.bmax > 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_ewl, embed, EwlSpec, Family};
    use nalgebra::Vector4;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ewl(family: Family, r: f64, alpha: f64) -> XState {
        build_ewl(EwlSpec::new(family, r, alpha).unwrap()).unwrap()
    }

    fn bell_phi() -> DensityMatrix {
        embed(&ewl(Family::Phi, 1.0, FRAC_1_SQRT_2))
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence_general(&bell_phi()).unwrap() - 1.0).abs() < 1e-12);
        let plus = Vector4::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0));
        assert!((concurrence_general(&DensityMatrix::from_pure(&plus).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(concurrence_general(&DensityMatrix::maximally_mixed()).unwrap(), 0.0);
        let x = ewl(Family::Phi, 0.95, FRAC_1_SQRT_2);
        assert!((concurrence_general(&embed(&x)).unwrap() - 0.925).abs() < 1e-12);
        assert!((concurrence_x(&x) - 0.925).abs() < 1e-15);
        assert!((concurrence_x(&ewl(Family::Psi, 0.95, FRAC_1_SQRT_2)) - 0.925).abs() < 1e-15);
    }

    #[test]
    fn concurrence_x_examples() {
        let bell = XState::new(0.0, 0.5, 0.5, 0.0, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(concurrence_x(&bell), 1.0);
        let x = XState::new(0.2, 0.3, 0.3, 0.2, c(0.1, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(concurrence_x(&x), 0.0);
        assert!(concurrence_general(&embed(&x)).unwrap() < 1e-12);
    }

    #[test]
    fn degraded_input_is_reported() {
        // Hermitian, unit trace, but strongly negative: the product spectrum
        // is no longer real and nonnegative.
        let mut m = DensityMatrix::maximally_mixed().into_inner();
        m[(0, 0)] = c(1.2, 0.0);
        m[(3, 3)] = c(-0.7, 0.0);
        let rho = DensityMatrix::new_unchecked(m);
        assert!(concurrence_general(&rho).is_err());
    }

    #[test]
    fn bell_x_examples() {
        let (b, _, _) = bell_max_x(&ewl(Family::Phi, 1.0, FRAC_1_SQRT_2));
        assert!((b - TSIRELSON).abs() < 1e-15);
        let (b, p, q) = bell_max_x(&ewl(Family::Psi, 0.0, 0.3));
        assert_eq!((b, p, q), (0.0, 0.0, 0.0));
        let (b, p, q) = bell_max_x(&ewl(Family::Psi, 0.95, FRAC_1_SQRT_2));
        assert!((b - 1.9 * std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((b - 2.0 * (p * p + q * q).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bell_max_exceeds_p_q_formula_when_coherences_differ() {
        // Q' = 2||ρ14| − |ρ23|| = 0.8 exceeds |P| = 0, so the maximum is
        // 2√(Q² + Q'²), not 2√(P² + Q²).
        let x = XState::new(0.25, 0.25, 0.25, 0.25, c(0.0, 0.0), c(0.2, 0.0)).unwrap();
        let (b, p, q) = bell_max_x(&x);
        assert!((b - 2.0 * (0.16f64 + 0.16).sqrt()).abs() < 1e-15);
        assert!(b > 2.0 * (p * p + q * q).sqrt());
        assert!((b - bell_max_horodecki(&embed(&x))).abs() < 1e-12);
    }

    #[test]
    fn horodecki_examples() {
        assert!((bell_max_horodecki(&bell_phi()) - TSIRELSON).abs() < 1e-12);
        let up = Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let rho = DensityMatrix::from_pure(&up).unwrap();
        assert_eq!(
            correlation_matrix(&rho),
            Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))
        );
        assert!((bell_max_horodecki(&rho) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_angles_reach_tsirelson() {
        assert!((bell_value(&bell_phi(), &BellAngles::canonical()) - TSIRELSON).abs() < 1e-12);
        let zero = bell_value(&DensityMatrix::maximally_mixed(), &BellAngles::canonical());
        assert_eq!(zero, 0.0);
        let same = BellAngles::shared_azimuth(0.3, 0.3, 1.1, 1.1, 0.2, 0.9);
        assert!(bell_value(&bell_phi(), &same) <= 2.0 + 1e-12);
    }

    #[test]
    fn numeric_max_matches_closed_form() {
        let x = ewl(Family::Phi, 0.95, FRAC_1_SQRT_2);
        let (v, angles) = bell_numeric_max(&embed(&x));
        assert!((v - 2.686_810_4).abs() < 1e-3, "{v}");
        assert!(v <= bell_max_x(&x).0 + 1e-9);
        assert!((bell_value(&embed(&x), &angles) - v).abs() < 1e-12);
        for th in [
            angles.theta_a,
            angles.theta_b,
            angles.theta_a_prime,
            angles.theta_b_prime,
        ] {
            assert!((0.0..=std::f64::consts::PI).contains(&th));
        }
    }

    #[test]
    fn measure_sample_dispatch() {
        let x = ewl(Family::Phi, 0.95, FRAC_1_SQRT_2);
        let s = MeasureSample::from_density(0.5, &embed(&x)).unwrap();
        assert_eq!(s, MeasureSample::from_x(0.5, &x));
        let mut m = embed(&x).into_inner();
        m[(0, 1)] = c(0.001, 0.0);
        m[(1, 0)] = c(0.001, 0.0);
        let g = MeasureSample::from_density(0.5, &DensityMatrix::new_unchecked(m)).unwrap();
        assert!((g.concurrence - s.concurrence).abs() < 1e-3);
        assert!(s.violates_chsh());
    }
}
