//! Closed-form time evolution of the reduced density matrix.
//!
//! The populations ρ11, ρ44 are frozen, single-excitation-flip coherences
//! (ρ12, ρ13, ρ24, ρ34) rotate at 2J and decay as e^{−f}, ρ14 decays as
//! e^{−2f}, and the ρ22/ρ33/ρ23 block is expressed through Kummer functions
//! of −(Γ/γ)e^{−γt}. The symbols below (Y, Z, A, B, K, L, M, C, D, E) are
//! the intermediate quantities of that solution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{ModelParams, SpectralParams};
use crate::specfun::{decay_f, hyp1f1, KernelParams, POLE_TOL};
use crate::state::{CMatrix4, DensityMatrix, EwlSpec, Family};

/// Couplings below `J_ZERO_THRESHOLD · Γ` use the J = 0 solution.
pub const J_ZERO_THRESHOLD: f64 = 1e-10;
/// Relative size below which M or E counts as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Largest spurious imaginary part tolerated on a real quantity.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Time-independent part of the closed-form solution for one initial state.
///
/// `m` and `e` are stored without the `(1/J²)^{η₊}` prefactor of M (kept in
/// log form in `m_log_prefactor`); `c_bracket` and `d_bracket` are C and D
/// stripped of their time-dependent `(·/J²)^{ε/γ} ₁F₁(…)` factors. The
/// J² powers are recombined in log space when evaluating, which keeps them
/// finite for small J and small γ.
#[derive(Debug, Clone)]
pub struct AnalyticCoefficients {
    pub params: ModelParams,
    pub spectral: SpectralParams,
    pub y: Complex64,
    pub k: Complex64,
    pub l: Complex64,
    pub m: Complex64,
    pub m_log_prefactor: Complex64,
    pub c_bracket: Complex64,
    pub d_bracket: Complex64,
    pub e: Complex64,
    rho0: CMatrix4,
    eps_over_gamma: Complex64,
    ln_inv_j2: f64,
}

/// Time-dependent intermediates at a single t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeTerms {
    pub t: f64,
    pub f: f64,
    pub z: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

fn degenerate(eps_over_gamma: Complex64, reason: impl Into<String>) -> Error {
    Error::DegenerateParameters {
        eps_over_gamma,
        reason: reason.into(),
    }
}

impl AnalyticCoefficients {
    pub fn new(rho0: &DensityMatrix, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let coupling = params.coupling;
        if coupling < J_ZERO_THRESHOLD * params.damping {
            return Err(Error::Contract(format!(
                "coupling {coupling} is below the J = 0 threshold; use evolve_analytic_j0"
            )));
        }
        let sp = params.spectral();
        let eg = sp.eps_over_gamma(params);
        check_degenerate_b(eg)?;

        let big = params.damping;
        let small = params.bandwidth;
        let j2 = coupling * coupling;
        let eps = sp.epsilon;
        // Γ − ε, rationalized.
        let gm = 64.0 * j2 / (big + eps);
        let g2_minus_e2 = small * small - eps * eps;
        let z0 = Complex64::new(-big / small, 0.0);

        let f =
            |a: Complex64, b: Complex64| hyp1f1(a, b, z0).map_err(|err| degenerate(eg, format!("1F1 at t = 0: {err}")));
        let f_eta_p = f(sp.eta_plus, 1.0 + eg)?;
        let f_eta_m = f(sp.eta_minus, 1.0 - eg)?;
        let f_kap_m_2 = f(sp.kappa_minus, 2.0 - eg)?;
        let f_kap_p_2 = f(sp.kappa_plus, 2.0 + eg)?;
        let f_kap_p_1 = f(sp.kappa_plus, 1.0 + eg)?;
        let f_kap_m_1 = f(sp.kappa_minus, 1.0 - eg)?;
        let f_del_p = f(sp.delta_plus, 2.0 + eg)?;
        let f_del_m = f(sp.delta_minus, 2.0 - eg)?;

        let m0 = rho0.elements();
        let u0 = m0[(1, 1)] - m0[(2, 2)];
        let rho23 = m0[(1, 2)];
        let rho32 = m0[(2, 1)];
        let v0 = rho23 - rho32;
        let y = m0[(1, 1)] + m0[(2, 2)];

        // γ(γ−Γ)(ε−Γ) − 64J²γ and γ(Γ−γ)(ε+Γ) − 64J²γ
        let p_minus = small * (small - big) * (-gm) - 64.0 * j2 * small;
        let p_plus = small * (big - small) * (eps + big) - 64.0 * j2 * small;
        // (γ+Γ)(Γ−2γ+ε) − 64J² and (γ+Γ)(2γ−Γ+ε) + 64J²
        let q_plus = (small + big) * (big - 2.0 * small + eps) - 64.0 * j2;
        let q_minus = (small + big) * (2.0 * small - gm) + 64.0 * j2;

        let k =
            -big * u0 * p_minus * f_kap_m_2 + small * g2_minus_e2 * f_eta_m * (u0 * (-gm) - 8.0 * I * coupling * v0);
        let l = big * u0 * p_plus * f_kap_p_2
            + small * g2_minus_e2 * f_eta_p * (u0 * (eps + big) + 8.0 * I * coupling * v0);

        let m_first = f_eta_m * (2.0 * small * eps * g2_minus_e2 * f_eta_p + big * p_plus * f_kap_p_2);
        let m_second = big * p_minus * f_eta_p * f_kap_m_2;
        let m = m_first - m_second;
        if m.norm() <= DEGENERACY_TOL * (m_first.norm() + m_second.norm()) {
            return Err(degenerate(eg, "M vanishes"));
        }

        let c_bracket = small * big * (rho32 - rho23) * q_plus * f_del_p
            + small * g2_minus_e2 * f_kap_p_1 * ((rho32 - rho23) * (big + eps) - 8.0 * I * coupling * u0);
        let d_bracket = small * big * (rho32 - rho23) * q_minus * f_del_m
            + small * g2_minus_e2 * f_kap_m_1 * ((rho23 - rho32) * gm + 8.0 * I * coupling * u0);

        let e_first = f_kap_m_1 * (-2.0 * small * eps * g2_minus_e2 * f_kap_p_1 - small * big * q_plus * f_del_p);
        let e_second = small * big * q_minus * f_del_m * f_kap_p_1;
        let e = e_first - e_second;
        if e.norm() <= DEGENERACY_TOL * (e_first.norm() + e_second.norm()) {
            return Err(degenerate(eg, "E vanishes"));
        }

        let ln_inv_j2 = -j2.ln();
        Ok(AnalyticCoefficients {
            params: *params,
            spectral: sp,
            y,
            k,
            l,
            m,
            m_log_prefactor: sp.eta_plus * ln_inv_j2,
            c_bracket,
            d_bracket,
            e,
            rho0: *m0,
            eps_over_gamma: eg,
            ln_inv_j2,
        })
    }

    pub fn time_terms(&self, t: f64) -> Result<TimeTerms> {
        let p = &self.params;
        let sp = &self.spectral;
        let eg = self.eps_over_gamma;
        let f = decay_f(KernelParams::from(p), t)?;

        let ln_s = -p.bandwidth * t;
        let ln_inv = self.ln_inv_j2;
        let ln_s_over = ln_s + ln_inv;
        let zt = Complex64::new(-(p.damping / p.bandwidth) * ln_s.exp(), 0.0);

        let ft = |a: Complex64, b: Complex64| {
            hyp1f1(a, b, zt).map_err(|err| degenerate(eg, format!("1F1 at t = {t}: {err}")))
        };

        // Z = [K (s/J²)^{η₊} F(η₊; 1+ε/γ; zt) + L (1/J²)^{ε/γ} (s/J²)^{η₋} F(η₋; 1−ε/γ; zt)] / M
        let z_first = self.k * (sp.eta_plus * ln_s_over - self.m_log_prefactor).exp() * ft(sp.eta_plus, 1.0 + eg)?;
        let z_second = self.l
            * (eg * ln_inv + sp.eta_minus * ln_s_over - self.m_log_prefactor).exp()
            * ft(sp.eta_minus, 1.0 - eg)?;
        let z = (z_first + z_second) / self.m;

        let rho23 = self.rho0[(1, 2)];
        let a = (rho23 + rho23.conj()) * (-2.0 * f).exp();

        // B = (1/J²)^{−η₊} (s/J²)^{η₋} (C + D) / E
        let outer = -sp.eta_plus * ln_inv + sp.eta_minus * ln_s_over;
        let c = (outer + eg * ln_inv).exp() * ft(sp.kappa_minus, 1.0 - eg)? * self.c_bracket;
        let d = (outer + eg * ln_s_over).exp() * ft(sp.kappa_plus, 1.0 + eg)? * self.d_bracket;
        let b = (c + d) / self.e;

        Ok(TimeTerms { t, f, z, a, b })
    }

    pub fn evaluate(&self, t: f64) -> Result<DensityMatrix> {
        let terms = self.time_terms(t)?;
        if terms.z.im.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::NumericDegradation(format!(
                "Z has imaginary residue {:e} at t = {t}",
                terms.z.im
            )));
        }
        if terms.b.re.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::NumericDegradation(format!(
                "B has real residue {:e} at t = {t}",
                terms.b.re
            )));
        }
        let y = self.y.re;
        let rho22 = 0.5 * (y + terms.z.re);
        let rho33 = 0.5 * (y - terms.z.re);
        let rho23 = Complex64::new(0.5 * terms.a.re, 0.5 * terms.b.im);
        Ok(assemble(
            &self.rho0,
            self.params.coupling,
            t,
            terms.f,
            rho22,
            rho33,
            rho23,
        ))
    }
}

fn check_degenerate_b(eg: Complex64) -> Result<()> {
    if eg.norm() < POLE_TOL {
        return Err(degenerate(
            eg,
            "epsilon = 0 (8J = Gamma): the two Kummer solutions coincide",
        ));
    }
    let nearest = eg.re.round();
    if nearest >= 1.0 && (eg - nearest).norm() < POLE_TOL {
        return Err(degenerate(
            eg,
            format!("epsilon/gamma is within pole tolerance of the integer {nearest}"),
        ));
    }
    Ok(())
}

/// Builds the Hermitian result from the block solution and the rotated
/// single-flip coherences.
fn assemble(rho0: &CMatrix4, coupling: f64, t: f64, f: f64, rho22: f64, rho33: f64, rho23: Complex64) -> DensityMatrix {
    let (sin, cos) = (2.0 * coupling * t).sin_cos();
    let e1 = (-f).exp();
    let e2 = (-2.0 * f).exp();
    let r = rho0;
    let mut m = CMatrix4::zeros();
    m[(0, 0)] = r[(0, 0)].re.into();
    m[(3, 3)] = r[(3, 3)].re.into();
    m[(1, 1)] = rho22.into();
    m[(2, 2)] = rho33.into();
    m[(0, 1)] = (r[(0, 1)] * cos + I * r[(0, 2)] * sin) * e1;
    m[(0, 2)] = (r[(0, 2)] * cos + I * r[(0, 1)] * sin) * e1;
    m[(0, 3)] = r[(0, 3)] * e2;
    m[(1, 2)] = rho23;
    m[(1, 3)] = (r[(1, 3)] * cos - I * r[(2, 3)] * sin) * e1;
    m[(2, 3)] = (r[(2, 3)] * cos - I * r[(1, 3)] * sin) * e1;
    for i in 0..4 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    DensityMatrix::new_unchecked(m)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn evolve_j0_unchecked(rho0: &DensityMatrix, params: &ModelParams, t: f64) -> Result<DensityMatrix> {
    let f = decay_f(KernelParams::from(params), t)?;
    let r = rho0.elements();
    let rho23 = r[(1, 2)] * (-2.0 * f).exp();
    Ok(assemble(r, 0.0, t, f, r[(1, 1)].re, r[(2, 2)].re, rho23))
}

/// Closed-form evolution for J = 0, where every coherence decays as a pure
/// exponential of f(t).
pub fn evolve_analytic_j0(rho0: &DensityMatrix, params: &ModelParams, t: f64) -> Result<DensityMatrix> {
    params.validate()?;
    check_time(t)?;
    if params.coupling != 0.0 {
        return Err(Error::Contract(format!(
            "evolve_analytic_j0 requires J = 0, got {}",
            params.coupling
        )));
    }
    evolve_j0_unchecked(rho0, params, t)
}

/// Reusable closed-form propagator for one initial state: constants are
/// computed once and [`AnalyticPropagator::at`] evaluates any time.
#[derive(Debug, Clone)]
pub enum AnalyticPropagator {
    Uncoupled { rho0: DensityMatrix, params: ModelParams },
    Coupled(Box<AnalyticCoefficients>),
}

impl AnalyticPropagator {
    pub fn new(rho0: &DensityMatrix, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if params.coupling < J_ZERO_THRESHOLD * params.damping {
            Ok(AnalyticPropagator::Uncoupled {
                rho0: *rho0,
                params: *params,
            })
        } else {
            Ok(AnalyticPropagator::Coupled(Box::new(AnalyticCoefficients::new(
                rho0, params,
            )?)))
        }
    }

    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        check_time(t)?;
        match self {
            AnalyticPropagator::Uncoupled { rho0, params } => evolve_j0_unchecked(rho0, params, t),
            AnalyticPropagator::Coupled(coeffs) => coeffs.evaluate(t),
        }
    }
}

/// Closed-form density matrix at time t. Couplings below the J = 0
/// threshold are routed to [`evolve_analytic_j0`]'s solution; degenerate
/// spectral parameters are reported as [`Error::DegenerateParameters`].
pub fn evolve_analytic(rho0: &DensityMatrix, params: &ModelParams, t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    AnalyticPropagator::new(rho0, params)?.at(t)
}

/// Concurrence and CHSH maximum of an evolved Ψ-family state. Independent
/// of J.
pub fn cb_psi_closed(spec: &EwlSpec, params: &ModelParams, t: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    params.validate()?;
    if spec.family != Family::Psi {
        return Err(Error::Contract("cb_psi_closed needs a Psi-family state".into()));
    }
    let f = decay_f(KernelParams::from(params), t)?;
    let r = spec.r;
    let ab = spec.alpha * spec.beta() * (-2.0 * f).exp();
    let c = 2.0 * (r * ab - (1.0 - r) / 4.0).max(0.0);
    let b = 2.0 * r * (1.0 + 4.0 * ab * ab).sqrt();
    Ok((c, b))
}

/// Concurrence and CHSH maximum of the evolved Φ state with α = 1/√2.
/// Independent of J.
pub fn cb_phi_bell_closed(r: f64, params: &ModelParams, t: f64) -> Result<(f64, f64)> {
    EwlSpec::new(Family::Phi, r, std::f64::consts::FRAC_1_SQRT_2)?;
    params.validate()?;
    let f = decay_f(KernelParams::from(params), t)?;
    let e2 = (-2.0 * f).exp();
    let c = (r * e2 - (1.0 - r) / 2.0).max(0.0);
    let b = 2.0 * r * (1.0 + e2 * e2).sqrt();
    Ok((c, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_ewl, embed};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn ewl(family: Family, r: f64, alpha: f64) -> DensityMatrix {
        embed(&build_ewl(EwlSpec::new(family, r, alpha).unwrap()).unwrap())
    }

    fn generic_x() -> DensityMatrix {
        let m = crate::state::XState::new(
            0.1,
            0.3,
            0.5,
            0.1,
            Complex64::new(0.02, -0.03),
            Complex64::new(0.1, 0.05),
        )
        .unwrap();
        embed(&m)
    }

    fn p(j: f64, ratio: f64) -> ModelParams {
        ModelParams::with_ratio(j, ratio).unwrap()
    }

    #[test]
    fn identity_at_time_zero() {
        for params in [p(0.4, 0.1), p(0.8, 10.0), p(0.11, 0.1), p(0.0, 1.0)] {
            let rho0 = generic_x();
            let rho = evolve_analytic(&rho0, &params, 0.0).unwrap();
            assert!(
                rho.max_abs_diff(&rho0) < 1e-12,
                "{params:?}: {}",
                rho.max_abs_diff(&rho0)
            );
        }
    }

    #[test]
    fn psi_state_coherence_decay() {
        let rho0 = ewl(Family::Psi, 0.95, FRAC_1_SQRT_2);
        let rho = evolve_analytic(&rho0, &p(0.5, 0.1), 1.0).unwrap();
        assert!((rho.get(0, 3).re - 0.452_569_174_679_021_27).abs() < 1e-14);
        for i in 0..4 {
            assert_eq!(rho.get(i, i), rho0.get(i, i));
        }
    }

    #[test]
    fn frozen_values_from_high_precision_evaluation() {
        // 30-digit Taylor integration of the master equation
        // (tools/golden_values.py).
        let rho0 = generic_x();
        let rho = evolve_analytic(&rho0, &p(0.4, 0.1), 2.3).unwrap();
        assert!((rho.get(1, 1).re - 0.499_044_723_878_643_29).abs() < 1e-12);
        assert!((rho.get(2, 2).re - 0.300_955_276_121_356_75).abs() < 1e-12);
        assert!((rho.get(1, 2) - Complex64::new(0.078_244_157_410_705_04, 0.009_859_826_555_502_22)).norm() < 1e-12);

        let rho = evolve_analytic(&rho0, &p(0.1, 10.0), 3.1).unwrap();
        assert!((rho.get(1, 1).re - 0.314_586_808_732_353_41).abs() < 1e-12);
        assert!((rho.get(1, 2) - Complex64::new(0.004_978_706_836_786_377, -0.033_937_997_386_560_995)).norm() < 1e-12);
    }

    #[test]
    fn j0_coherence_example() {
        let mut x = build_ewl(EwlSpec::new(Family::Phi, 1.0, FRAC_1_SQRT_2).unwrap()).unwrap();
        x.rho23 = Complex64::new(0.5, 0.0);
        let rho = evolve_analytic_j0(&embed(&x), &p(0.0, 0.1), 1.0).unwrap();
        assert!((rho.get(1, 2).re - 0.476_388_604_925_285_57).abs() < 1e-15);
        let same = evolve_analytic_j0(&embed(&x), &p(0.0, 0.1), 0.0).unwrap();
        assert!(same.max_abs_diff(&embed(&x)) < 1e-16);
    }

    #[test]
    fn j0_rejects_coupling() {
        let r = evolve_analytic_j0(&generic_x(), &p(0.3, 0.1), 1.0);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn tiny_coupling_is_continuous_with_j0() {
        let rho0 = generic_x();
        for &ratio in &[0.3, 0.7, 10.0] {
            for &t in &[0.5, 2.0, 7.0] {
                let a = evolve_analytic(&rho0, &p(1e-8, ratio), t).unwrap();
                let b = evolve_analytic_j0(&rho0, &p(0.0, ratio), t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-6, "t={t}: {}", a.max_abs_diff(&b));
            }
        }
        // With Γ/γ an integer, ε/γ → Γ/γ lands on a pole as J → 0.
        let r = evolve_analytic(&rho0, &p(1e-8, 0.1), 1.0);
        assert!(matches!(r, Err(Error::DegenerateParameters { .. })));
    }

    #[test]
    fn degenerate_at_eight_j_equals_gamma() {
        let r = evolve_analytic(&generic_x(), &p(0.125, 0.1), 1.0);
        assert!(matches!(r, Err(Error::DegenerateParameters { .. })), "{r:?}");
        // ε/γ = 3 puts b = 1 − ε/γ on a pole.
        let eps: f64 = 0.3;
        let j = ((1.0 - eps * eps) / 64.0).sqrt();
        let r = evolve_analytic(&generic_x(), &p(j, 0.1), 1.0);
        assert!(matches!(r, Err(Error::DegenerateParameters { .. })), "{r:?}");
    }

    #[test]
    fn negative_time_is_a_domain_error() {
        assert!(matches!(
            evolve_analytic(&generic_x(), &p(0.4, 0.1), -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn constants_of_motion() {
        let rho0 = generic_x();
        for params in [p(0.4, 0.1), p(0.8, 10.0), p(0.11, 0.3)] {
            let prop = AnalyticPropagator::new(&rho0, &params).unwrap();
            for i in 0..=50 {
                let rho = prop.at(i as f64 * 0.2).unwrap();
                assert!((rho.trace() - 1.0).norm() < 1e-12);
                assert_eq!(rho.get(0, 0), rho0.get(0, 0));
                assert_eq!(rho.get(3, 3), rho0.get(3, 3));
                let block = rho.get(1, 1).re + rho.get(2, 2).re;
                assert!((block - 0.8).abs() < 1e-12);
                assert!(rho.hermiticity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_bell_and_psi_states_ignore_coupling() {
        for rho0 in [
            ewl(Family::Phi, 0.9, FRAC_1_SQRT_2),
            ewl(Family::Psi, 0.9, 0.3),
            ewl(Family::Psi, 0.6, 1.0),
        ] {
            for &t in &[0.3, 1.0, 4.0, 9.5] {
                let free = evolve_analytic(&rho0, &p(0.0, 0.1), t).unwrap();
                let coupled = evolve_analytic(&rho0, &p(0.8, 0.1), t).unwrap();
                assert!(free.max_abs_diff(&coupled) < 1e-9);
            }
        }
    }

    #[test]
    fn markov_limit_is_exponential() {
        let rho0 = ewl(Family::Phi, 1.0, FRAC_1_SQRT_2);
        let params = p(0.0, 1e4);
        for i in 0..=50 {
            let t = i as f64 * 0.1;
            let rho = evolve_analytic_j0(&rho0, &params, t).unwrap();
            let want = 0.5 * (-t).exp();
            // Log-relative: the deviation is (1 − e^{−γt})Γ/γ ≤ 1e-4 exactly.
            assert!((rho.get(1, 2).re / want).ln().abs() <= 1e-4 + 1e-12);
        }
    }

    #[test]
    fn psi_closed_form_values() {
        let params = p(0.5, 0.1);
        let spec = EwlSpec::new(Family::Psi, 0.95, FRAC_1_SQRT_2).unwrap();
        let (c, b) = cb_psi_closed(&spec, &params, 0.0).unwrap();
        assert!((c - 0.925).abs() < 1e-15);
        assert!((b - 1.9 * SQRT_2).abs() < 1e-14);

        let product = EwlSpec::new(Family::Psi, 1.0, 0.0).unwrap();
        for &t in &[0.0, 2.0, 8.0] {
            let (c, b) = cb_psi_closed(&product, &params, t).unwrap();
            assert_eq!(c, 0.0);
            assert!((b - 2.0).abs() < 1e-15);
            let (c, b) = cb_psi_closed(&EwlSpec::new(Family::Psi, 0.0, 0.4).unwrap(), &params, t).unwrap();
            assert_eq!((c, b), (0.0, 0.0));
        }
        let phi = EwlSpec::new(Family::Phi, 0.9, 0.5).unwrap();
        assert!(matches!(cb_psi_closed(&phi, &params, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn phi_bell_closed_form_values() {
        let params = p(0.4, 0.1);
        let (c, b) = cb_phi_bell_closed(1.0, &params, 0.0).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        assert!((b - 2.0 * SQRT_2).abs() < 1e-15);
        let (c, b) = cb_phi_bell_closed(0.95, &params, 0.0).unwrap();
        assert!((c - 0.925).abs() < 1e-15);
        assert!((b - 1.9 * SQRT_2).abs() < 1e-14);
        // Matches the Ψ family at α = 1/√2.
        let psi = EwlSpec::new(Family::Psi, 0.95, FRAC_1_SQRT_2).unwrap();
        for &t in &[0.5, 3.0, 9.0] {
            let a = cb_phi_bell_closed(0.95, &params, t).unwrap();
            let b = cb_psi_closed(&psi, &params, t).unwrap();
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }
        // r = 0.5: dies once e^{−2f} < 1/2 and Bmax tends to 2r = 1.
        let (c, b) = cb_phi_bell_closed(0.5, &params, 200.0).unwrap();
        assert_eq!(c, 0.0);
        assert!((b - 1.0).abs() < 1e-12);
    }
}
