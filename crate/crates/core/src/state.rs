//! Two-qubit density matrices, the X-state parameterization and the
//! extended Werner-like initial states.
//!
//! Every matrix in the crate uses the basis order of [`BASIS_LABELS`]:
//! index 0 is |11⟩, 1 is |10⟩, 2 is |01⟩ and 3 is |00⟩.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix4 = Matrix4<Complex64>;

pub const BASIS_LABELS: [&str; 4] = ["|11>", "|10>", "|01>", "|00>"];

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_CLIP, 0)` are treated as zero; anything more
/// negative is an error.
pub const PSD_CLIP: f64 = 1e-10;

/// Matrix positions that are structurally zero in an X state.
pub(crate) const NON_X_POSITIONS: [(usize, usize); 8] =
    [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    elements: CMatrix4,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at the default
    /// tolerances.
    pub fn new(elements: CMatrix4) -> Result<Self> {
        let rho = DensityMatrix { elements };
        rho.validate(HERMITIAN_TOL, TRACE_TOL, PSD_CLIP)?;
        Ok(rho)
    }

    /// Wraps a matrix produced by one of the propagators without checking it.
    pub fn new_unchecked(elements: CMatrix4) -> Self {
        DensityMatrix { elements }
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            elements: CMatrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn from_pure(psi: &Vector4<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::validation("state", format!("norm {norm} is not 1")));
        }
        Ok(DensityMatrix {
            elements: psi * psi.adjoint(),
        })
    }

    pub fn elements(&self) -> &CMatrix4 {
        &self.elements
    }

    pub fn into_inner(self) -> CMatrix4 {
        self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.elements.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in i..4 {
                let d = (self.elements[(i, j)] - self.elements[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Hermitian eigendecomposition; eigenvalues are not clipped.
    pub fn eigen(&self) -> SymmetricEigen<Complex64, nalgebra::U4> {
        // Symmetrize first so the solver sees an exactly Hermitian input.
        let h = (self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigen()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().eigenvalues.min()
    }

    pub fn validate(&self, hermitian_tol: f64, trace_tol: f64, psd_clip: f64) -> Result<()> {
        if self.elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("elements", "non-finite entry"));
        }
        let defect = self.hermiticity_defect();
        if defect > hermitian_tol {
            return Err(Error::validation(
                "elements",
                format!("not Hermitian (defect {defect:e})"),
            ));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > trace_tol {
            return Err(Error::validation("elements", format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -psd_clip {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }

    /// Eigen-decomposition with the clip policy applied: returns
    /// `(weights, vectors)` with weights ≥ 0.
    pub fn clipped_spectrum(&self) -> Result<(Vector4<f64>, Matrix4<Complex64>)> {
        let eig = self.eigen();
        let mut weights = eig.eigenvalues;
        for w in weights.iter_mut() {
            if *w < -PSD_CLIP {
                return Err(Error::NotPositive { min_eigenvalue: *w });
            }
            *w = w.max(0.0);
        }
        Ok((weights, eig.eigenvectors))
    }

    /// Largest magnitude among the entries outside the X pattern.
    pub fn non_x_magnitude(&self) -> (usize, usize, f64) {
        NON_X_POSITIONS
            .iter()
            .map(|&(i, j)| (i, j, self.elements[(i, j)].norm()))
            .fold((0, 0, 0.0), |best, cur| if cur.2 > best.2 { cur } else { best })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.elements - other.elements)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Density matrix restricted to the diagonal and anti-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: Complex64,
    pub rho23: Complex64,
}

impl XState {
    pub fn new(rho11: f64, rho22: f64, rho33: f64, rho44: f64, rho14: Complex64, rho23: Complex64) -> Result<Self> {
        let x = XState {
            rho11,
            rho22,
            rho33,
            rho44,
            rho14,
            rho23,
        };
        x.validate()?;
        Ok(x)
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.rho11, self.rho22, self.rho33, self.rho44]
    }

    pub fn validate(&self) -> Result<()> {
        let pops = self.populations();
        if pops.iter().any(|p| !p.is_finite()) || !self.rho14.norm().is_finite() || !self.rho23.norm().is_finite() {
            return Err(Error::validation("populations", "non-finite entry"));
        }
        if let Some(p) = pops.iter().find(|&&p| p < -1e-12) {
            return Err(Error::validation("populations", format!("negative population {p}")));
        }
        let sum: f64 = pops.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::validation("populations", format!("sum {sum} is not 1")));
        }
        if self.rho14.norm() > (self.rho11 * self.rho44).max(0.0).sqrt() + 1e-10 {
            return Err(Error::validation("rho14", "exceeds sqrt(rho11 rho44)"));
        }
        if self.rho23.norm() > (self.rho22 * self.rho33).max(0.0).sqrt() + 1e-10 {
            return Err(Error::validation("rho23", "exceeds sqrt(rho22 rho33)"));
        }
        Ok(())
    }
}

pub fn embed(x: &XState) -> DensityMatrix {
    let mut m = CMatrix4::zeros();
    m[(0, 0)] = x.rho11.into();
    m[(1, 1)] = x.rho22.into();
    m[(2, 2)] = x.rho33.into();
    m[(3, 3)] = x.rho44.into();
    m[(0, 3)] = x.rho14;
    m[(3, 0)] = x.rho14.conj();
    m[(1, 2)] = x.rho23;
    m[(2, 1)] = x.rho23.conj();
    DensityMatrix::new_unchecked(m)
}

/// Reads the X entries of `rho`, failing if any other entry exceeds `tol`.
pub fn project_x(rho: &DensityMatrix, tol: f64) -> Result<XState> {
    let (row, col, magnitude) = rho.non_x_magnitude();
    if magnitude >= tol {
        return Err(Error::NonXState { row, col, magnitude });
    }
    let m = rho.elements();
    Ok(XState {
        rho11: m[(0, 0)].re,
        rho22: m[(1, 1)].re,
        rho33: m[(2, 2)].re,
        rho44: m[(3, 3)].re,
        rho14: m[(0, 3)],
        rho23: m[(1, 2)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Werner-like mixture around α|10⟩ + β|01⟩.
    Phi,
    /// Werner-like mixture around α|11⟩ + β|00⟩.
    Psi,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(Family::Phi),
            "psi" => Ok(Family::Psi),
            other => Err(Error::validation("family", format!("unknown family {other:?}"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Phi => "phi",
            Family::Psi => "psi",
        })
    }
}

/// Extended Werner-like state `(1 − r) I/4 + r |ψ⟩⟨ψ|` with a real amplitude
/// α and β = sqrt(1 − α²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwlSpec {
    pub family: Family,
    pub r: f64,
    pub alpha: f64,
}

impl EwlSpec {
    pub fn new(family: Family, r: f64, alpha: f64) -> Result<Self> {
        let spec = EwlSpec { family, r, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::validation("r", format!("must lie in [0, 1], got {}", self.r)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(
                "alpha",
                format!("must lie in [0, 1], got {}", self.alpha),
            ));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }
}

pub fn build_ewl(spec: EwlSpec) -> Result<XState> {
    spec.validate()?;
    let EwlSpec { family, r, alpha } = spec;
    let beta = spec.beta();
    let q = (1.0 - r) / 4.0;
    let coherence = Complex64::new(alpha * beta * r, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match family {
        Family::Phi => XState {
            rho11: q,
            rho22: q + alpha * alpha * r,
            rho33: q + beta * beta * r,
            rho44: q,
            rho14: zero,
            rho23: coherence,
        },
        Family::Psi => XState {
            rho11: q + alpha * alpha * r,
            rho22: q,
            rho33: q,
            rho44: q + beta * beta * r,
            rho14: coherence,
            rho23: zero,
        },
    })
}
