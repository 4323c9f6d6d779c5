//! Vertex scattering matrices for each supported vertex condition.

use std::f64::consts::PI;

use thiserror::Error;

use crate::graph::VertexCondition;
use crate::linalg::{self, c, C64, CMatrix, I};

/// Frobenius tolerance for `σσ† = I`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VertexError {
    #[error("vertex degree must be at least 1")]
    InvalidDegree,
    #[error("A + ikB is singular at k = {0}")]
    SingularAtK(C64),
    #[error("A B^† is not Hermitian (defect {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("vertex scattering matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("condition is sized {size} but the vertex has degree {degree}")]
    DegreeMismatch { size: usize, degree: usize },
}

/// The rule `k ↦ σ_v(k)` at one vertex.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexSigma {
    Constant(CMatrix),
    LinearAb { a: CMatrix, b: CMatrix },
}

impl VertexSigma {
    pub fn degree(&self) -> usize {
        match self {
            VertexSigma::Constant(m) => m.nrows(),
            VertexSigma::LinearAb { a, .. } => a.nrows(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, VertexSigma::Constant(_))
    }

    pub fn at(&self, k: C64) -> Result<CMatrix, VertexError> {
        match self {
            VertexSigma::Constant(m) => Ok(m.clone()),
            VertexSigma::LinearAb { a, b } => ab_to_sigma_complex(a, b, k),
        }
    }

    /// σ for `cond` at a vertex with `degree` channels.
    ///
    /// Degree zero gives the empty matrix for the degree-adaptive conditions.
    pub fn from_condition(cond: &VertexCondition, degree: usize) -> Result<VertexSigma, VertexError> {
        if let Some(size) = cond.fixed_size() {
            if size != degree {
                return Err(VertexError::DegreeMismatch { size, degree });
            }
        }
        let sigma = match cond {
            VertexCondition::Neumann {} if degree == 0 => VertexSigma::Constant(CMatrix::zeros(0, 0)),
            VertexCondition::Dirichlet {} if degree == 0 => VertexSigma::Constant(CMatrix::zeros(0, 0)),
            VertexCondition::Neumann {} => neumann_sigma(degree)?,
            VertexCondition::Dirichlet {} => dirichlet_sigma(degree)?,
            VertexCondition::Dft { degree } => dft_sigma(*degree)?,
            VertexCondition::FixedUnitary { sigma } => {
                let defect = linalg::unitarity_defect(sigma);
                if defect > UNITARITY_TOL {
                    return Err(VertexError::NotUnitary(defect));
                }
                VertexSigma::Constant(sigma.clone())
            }
            VertexCondition::LinearAb { a, b } => {
                // A constant σ is stored as such so that the interior determinant stays holomorphic.
                let s1 = ab_to_sigma(a, b, 1.0, false)?;
                let s2 = ab_to_sigma(a, b, 2.7, false)?;
                for s in [&s1, &s2] {
                    let defect = linalg::unitarity_defect(s);
                    if defect > UNITARITY_TOL {
                        return Err(VertexError::NotUnitary(defect));
                    }
                }
                if linalg::frobenius(&(&s1 - &s2)) <= 1e-13 * (1.0 + linalg::frobenius(&s1)) {
                    VertexSigma::Constant(s1)
                } else {
                    VertexSigma::LinearAb { a: a.clone(), b: b.clone() }
                }
            }
        };
        Ok(sigma)
    }
}

/// Neumann (Kirchhoff) condition: `σ_ij = 2/d − δ_ij`.
pub fn neumann_sigma(d: usize) -> Result<VertexSigma, VertexError> {
    if d == 0 {
        return Err(VertexError::InvalidDegree);
    }
    let off = 2.0 / d as f64;
    Ok(VertexSigma::Constant(CMatrix::from_fn(d, d, |i, j| {
        c(if i == j { off - 1.0 } else { off }, 0.0)
    })))
}

pub fn dirichlet_sigma(d: usize) -> Result<VertexSigma, VertexError> {
    if d == 0 {
        return Err(VertexError::InvalidDegree);
    }
    Ok(VertexSigma::Constant(-linalg::identity(d)))
}

/// Discrete Fourier transform matrix `σ_pq = exp(2πi pq/d)/√d`.
pub fn dft_sigma(d: usize) -> Result<VertexSigma, VertexError> {
    if d == 0 {
        return Err(VertexError::InvalidDegree);
    }
    let norm = (d as f64).sqrt();
    Ok(VertexSigma::Constant(CMatrix::from_fn(d, d, |p, q| {
        let phase = 2.0 * PI * ((p * q) % d) as f64 / d as f64;
        C64::from_polar(1.0 / norm, phase)
    })))
}

/// `σ(k) = −(A + ikB)⁻¹(A − ikB)` at real `k`.
///
/// With `check_self_adjoint`, rejects pairs where `A B†` is not Hermitian.
pub fn ab_to_sigma(a: &CMatrix, b: &CMatrix, k: f64, check_self_adjoint: bool) -> Result<CMatrix, VertexError> {
    if check_self_adjoint {
        let abh = a * b.adjoint();
        let defect = linalg::frobenius(&(&abh - abh.adjoint()));
        if defect > 1e-10 * (1.0 + linalg::frobenius(&abh)) {
            return Err(VertexError::NotSelfAdjoint(defect));
        }
    }
    ab_to_sigma_complex(a, b, c(k, 0.0))
}

/// Same formula continued to complex `k`.
pub fn ab_to_sigma_complex(a: &CMatrix, b: &CMatrix, k: C64) -> Result<CMatrix, VertexError> {
    let ikb = b * (I * k);
    let plus = a + &ikb;
    let minus = a - &ikb;
    let scale = linalg::spectral_norm(&plus);
    if scale == 0.0 || linalg::min_singular_value(&plus) <= 1e-13 * scale {
        return Err(VertexError::SingularAtK(k));
    }
    let lu = plus.lu();
    let x = lu.solve(&minus).ok_or(VertexError::SingularAtK(k))?;
    Ok(-x)
}

/// `(A, B)` encoding continuity plus vanishing derivative sum at a degree-`d` vertex.
pub fn neumann_ab(d: usize) -> (CMatrix, CMatrix) {
    let mut a = CMatrix::zeros(d, d);
    let mut b = CMatrix::zeros(d, d);
    for r in 0..d.saturating_sub(1) {
        a[(r, r)] = linalg::ONE;
        a[(r, r + 1)] = -linalg::ONE;
    }
    for j in 0..d {
        b[(d - 1, j)] = linalg::ONE;
    }
    (a, b)
}
