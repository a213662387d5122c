//! Double-double ("compensated") arithmetic for real and complex values.
//!
//! Only what the hypergeometric series needs: addition, multiplication and
//! division with roughly 104-bit significands.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Unit roundoff of double-double arithmetic, rounded up.
pub(crate) const DD_EPS: f64 = 1.0 / (1u128 << 100) as f64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }

    fn conj(self) -> DdComplex {
        DdComplex {
            re: self.re,
            im: -self.im,
        }
    }

    fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }
}

impl From<Complex64> for DdComplex {
    fn from(z: Complex64) -> Self {
        DdComplex {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

impl From<f64> for DdComplex {
    fn from(x: f64) -> Self {
        DdComplex {
            re: x.into(),
            im: Dd::ZERO,
        }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, rhs: DdComplex) -> DdComplex {
        let den = rhs.norm_sqr();
        let num = self * rhs.conj();
        DdComplex {
            re: num.re / den,
            im: num.im / den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_f64() {
        // (1 + 2^-70) − 1 vanishes in f64 but not here.
        let tiny = 2f64.powi(-70);
        let x = Dd::ONE + Dd::from(tiny);
        assert_eq!((x - Dd::ONE).to_f64(), tiny);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = DdComplex::from(Complex64::new(0.3, -1.7));
        let b = DdComplex::from(Complex64::new(-2.9, 0.4));
        let back = (a * b) / b;
        let diff = DdComplex {
            re: back.re - a.re,
            im: back.im - a.im,
        };
        assert!(diff.norm_f64() < 1e-30);
    }

    #[test]
    fn one_third_is_exact_to_dd_precision() {
        let third = Dd::ONE / Dd::from(3.0);
        let resid = Dd::ONE - third * Dd::from(3.0);
        assert!(resid.to_f64().abs() < 1e-31);
    }
}
