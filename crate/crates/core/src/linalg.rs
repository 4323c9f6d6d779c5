//! Dense complex linear algebra shared by the solvers.
//!
//! Thin layer over `nalgebra`: determinants go through LU with partial
//! pivoting, ranks and null spaces through the SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j], 0.0))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖M M† − I‖_F`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    frobenius(&(m * m.adjoint() - identity(m.nrows())))
}

/// Determinant by LU with partial pivoting. The empty matrix has determinant one.
pub fn det(m: &CMatrix) -> C64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return ONE;
    }
    m.clone().lu().determinant()
}

/// Singular values in ascending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

pub fn min_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank with singular values counted above `rel_tol · σ_max`.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&max) = s.last() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * max).count()
}

/// Orthonormal basis of the right null space of `m`.
///
/// A singular value counts as zero when it is at most `rel_tol` times the
/// largest one; an all-zero matrix has the whole space as null space.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Vec<CVector> {
    null_space_scaled(m, rel_tol, 0.0)
}

/// As [`null_space`], with the threshold taken relative to `max(σ_max, scale)`.
///
/// `scale` keeps a matrix that is zero up to rounding from counting as full rank.
pub fn null_space_scaled(m: &CMatrix, rel_tol: f64, scale: f64) -> Vec<CVector> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Vec::new();
    }
    // Thin SVD only yields min(rows, cols) right vectors; pad so all are present.
    let padded = if m.nrows() < ncols {
        let mut p = CMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let max = svd.singular_values.iter().copied().fold(scale, f64::max);
    let mut basis: Vec<(f64, CVector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| max == 0.0 || s <= rel_tol * max)
        .map(|(i, &s)| (s, v_t.row(i).adjoint()))
        .collect();
    basis.sort_by(|a, b| a.0.total_cmp(&b.0));
    basis.into_iter().map(|(_, v)| v).collect()
}

/// Moore–Penrose pseudo-inverse.
pub fn pseudo_inverse(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMatrix::zeros(m.ncols(), m.nrows());
    }
    let max = singular_values(m).last().copied().unwrap_or(0.0);
    m.clone()
        .pseudo_inverse(1e-13 * max.max(f64::MIN_POSITIVE))
        .expect("non-negative epsilon")
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut cc) = (0, 0);
    for b in blocks {
        out.view_mut((r, cc), b.shape()).copy_from(b);
        r += b.nrows();
        cc += b.ncols();
    }
    out
}

/// Column-major `vec` of a matrix.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, nrows: usize, ncols: usize) -> CMatrix {
    assert_eq!(v.len(), nrows * ncols);
    CMatrix::from_iterator(nrows, ncols, v.iter().copied())
}

/// Reduced row-echelon basis of the column span of `m`.
///
/// Each returned column has a unit entry at its pivot coordinate and zeros at
/// the pivot coordinates of the others, so the basis is canonical for the
/// subspace. Entries below `1e-14` of the pivot scale are flushed to zero.
pub fn echelon_column_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let mut rows = m.transpose();
    let (nr, nc) = rows.shape();
    let scale = rows.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return CMatrix::zeros(nc, 0);
    }
    let mut pivot_row = 0;
    for col in 0..nc {
        if pivot_row == nr {
            break;
        }
        let (best, best_norm) = (pivot_row..nr)
            .map(|r| (r, rows[(r, col)].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= tol * scale {
            continue;
        }
        rows.swap_rows(pivot_row, best);
        let p = rows[(pivot_row, col)];
        for j in 0..nc {
            rows[(pivot_row, j)] /= p;
        }
        for r in 0..nr {
            if r != pivot_row {
                let f = rows[(r, col)];
                if f != ZERO {
                    for j in 0..nc {
                        let v = rows[(pivot_row, j)];
                        rows[(r, j)] -= f * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    for z in rows.iter_mut() {
        if z.re.abs() < 1e-14 {
            z.re = 0.0;
        }
        if z.im.abs() < 1e-14 {
            z.im = 0.0;
        }
    }
    rows.rows(0, pivot_row).transpose()
}

/// Distance between the column spans of `a` and `b`: the spectral norm of the
/// difference of the orthogonal projectors. Zero iff the spans coincide.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let pa = projector(a);
    let pb = projector(b);
    singular_values(&(pa - pb)).last().copied().unwrap_or(0.0)
}

/// Orthogonal projector onto the column span of `m`.
pub fn projector(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), m.nrows());
    }
    m * pseudo_inverse(m)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn permutation_matrix(images: &[usize]) -> CMatrix {
    let n = images.len();
    let mut p = CMatrix::zeros(n, n);
    for (j, &i) in images.iter().enumerate() {
        p[(i, j)] = ONE;
    }
    p
}
