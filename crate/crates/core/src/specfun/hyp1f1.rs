use num_complex::Complex64;

use super::dd::{DdComplex, DD_EPS};
use crate::error::{Error, Result};

/// Distance from a nonpositive integer at which `b` counts as a pole.
pub const POLE_TOL: f64 = 1e-9;
/// Relative accuracy promised by [`hyp1f1`].
pub const HYP1F1_RTOL: f64 = 1e-13;
pub const MAX_TERMS: usize = 10_000;

// Truncation threshold on |term| / |sum|; well below HYP1F1_RTOL since the
// sum is carried in double-double.
const TRUNCATION: f64 = 1e-20;

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z) for complex
/// arguments, summed as a Maclaurin series.
///
/// Terms follow the ratio recurrence `t_{k+1} = t_k (a+k) z / ((b+k)(k+1))`
/// and are accumulated in double-double arithmetic, so the alternating
/// series for negative `z` keeps full double precision as long as the
/// largest term stays below ~1e17 times the result. When that fails the
/// call reports [`Error::PrecisionLoss`] instead of returning a bad value.
pub fn hyp1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    check_pole(b)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if a == b {
        return Ok(z.exp());
    }
    series(a, b, z)
}

pub(crate) fn check_pole(b: Complex64) -> Result<()> {
    let nearest = b.re.round();
    if nearest <= 0.0 && (b - nearest).norm() < POLE_TOL {
        return Err(Error::PoleParameter {
            b,
            pole: nearest as i64,
        });
    }
    Ok(())
}

pub(crate) fn series(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    let a_dd = DdComplex::from(a);
    let b_dd = DdComplex::from(b);
    let z_dd = DdComplex::from(z);

    let mut term = DdComplex::ONE;
    let mut sum = DdComplex::ONE;
    let mut abs_sum = 1.0f64;
    let mut terms = 0usize;

    loop {
        if terms >= MAX_TERMS {
            return Err(Error::NoConvergence { terms });
        }
        let k = terms as f64;
        let a_k = a_dd + DdComplex::from(k);
        if a_k.is_zero() {
            // a is a nonpositive integer: the series is a polynomial.
            break;
        }
        let b_k = b_dd + DdComplex::from(k);
        let den = b_k * DdComplex::from(k + 1.0);
        term = term * (a_k * z_dd) / den;
        sum = sum + term;
        terms += 1;

        let term_abs = term.norm_f64();
        abs_sum += term_abs;
        if !abs_sum.is_finite() {
            return Err(Error::NoConvergence { terms });
        }

        let next_ratio = (a + k + 1.0).norm() * z.norm() / ((b + k + 1.0).norm() * (k + 2.0));
        if next_ratio < 0.5 && term_abs <= TRUNCATION * sum.norm_f64() {
            break;
        }
        if term_abs == 0.0 {
            break;
        }
    }

    let value = sum.to_complex();
    // Each term carries a few dd roundings per recurrence step.
    let estimate = 4.0 * (terms as f64 + 1.0) * DD_EPS * abs_sum / value.norm();
    if !(estimate <= HYP1F1_RTOL) {
        return Err(Error::PrecisionLoss { estimate });
    }
    Ok(value)
}
