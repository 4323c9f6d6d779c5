//! Matrix representations, intertwiners, encoding maps and quotient scattering matrices.

use crate::graph::OpenGraph;
use crate::linalg::{self, C64, CMatrix, CVector};
use crate::scattering::ScatteringSystem;

use super::action::{lead_permutation_matrices, validate_action, GraphAction};
use super::character::ClassFunction;
use super::{FiniteGroup, SymmetryError, EQUIVARIANCE_TOL};

const HOM_TOL: f64 = 1e-12;

/// A homomorphism from a finite group into invertible `n × n` complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep {
    name: String,
    group: FiniteGroup,
    matrices: Vec<CMatrix>,
}

impl MatrixRep {
    pub fn new(name: &str, group: FiniteGroup, matrices: Vec<CMatrix>) -> Result<Self, SymmetryError> {
        if matrices.len() != group.order() {
            return Err(SymmetryError::DimensionMismatch {
                expected: group.order(),
                got: matrices.len(),
            });
        }
        let n = matrices[0].nrows();
        if let Some(m) = matrices.iter().find(|m| m.nrows() != n || m.ncols() != n) {
            return Err(SymmetryError::DimensionMismatch {
                expected: n,
                got: m.ncols().max(m.nrows()),
            });
        }
        if linalg::frobenius(&(&matrices[0] - linalg::identity(n))) > HOM_TOL {
            return Err(SymmetryError::NotHomomorphism(format!("`{name}` does not send the identity to I")));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a, b);
                let scale = 1.0 + linalg::frobenius(&matrices[ab]);
                if linalg::frobenius(&(&matrices[a] * &matrices[b] - &matrices[ab])) > HOM_TOL * scale {
                    return Err(SymmetryError::NotHomomorphism(format!(
                        "`{name}`: ρ({})ρ({}) ≠ ρ({})",
                        group.name(a),
                        group.name(b),
                        group.name(ab)
                    )));
                }
            }
        }
        Ok(MatrixRep {
            name: name.to_string(),
            group,
            matrices,
        })
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        let m = vec![linalg::identity(1); group.order()];
        MatrixRep::new("trivial", group.clone(), m).expect("trivial representation")
    }

    /// Left regular representation, `ρ(g) e_h = e_{gh}`.
    pub fn regular(group: &FiniteGroup) -> Self {
        let m = (0..group.order())
            .map(|a| {
                let images: Vec<usize> = (0..group.order()).map(|h| group.mul(a, h)).collect();
                linalg::permutation_matrix(&images)
            })
            .collect();
        MatrixRep::new("regular", group.clone(), m).expect("regular representation")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrix(&self, a: usize) -> &CMatrix {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn character(&self) -> ClassFunction {
        ClassFunction::new(self.group.clone(), self.matrices.iter().map(|m| m.trace()).collect())
    }

    /// `<χ, χ>`, equal to one exactly for irreducible representations.
    pub fn character_norm(&self) -> f64 {
        let chi = self.character();
        chi.inner(&chi).expect("same group").re
    }

    pub fn is_irreducible(&self) -> bool {
        (self.character_norm() - 1.0).abs() <= 1e-9
    }
}

/// Basis of intertwiners `Φ: V → L` between `ρ` and the lead permutation action.
///
/// Solves `P(g) Φ = Φ ρ(g⁻¹)ᵀ` for all `g` by stacking the vectorised
/// constraints `(I_n ⊗ P(g) − ρ(g⁻¹) ⊗ I_L) vec Φ = 0`. The basis is
/// orthonormal in the Frobenius inner product.
pub fn intertwiner_basis(perms: &[CMatrix], rho: &MatrixRep) -> Result<Vec<CMatrix>, SymmetryError> {
    let g = rho.group();
    if perms.len() != g.order() {
        return Err(SymmetryError::DimensionMismatch {
            expected: g.order(),
            got: perms.len(),
        });
    }
    let l = perms[0].nrows();
    let n = rho.dim();
    let size = l * n;
    let mut stacked = CMatrix::zeros(size * g.order(), size);
    for (a, p) in perms.iter().enumerate() {
        let block = linalg::kron(&linalg::identity(n), p) - linalg::kron(rho.matrix(g.inverse(a)), &linalg::identity(l));
        stacked.view_mut((a * size, 0), (size, size)).copy_from(&block);
    }
    Ok(linalg::null_space(&stacked, 1e-10)
        .iter()
        .map(|v| linalg::unvectorize(v, l, n))
        .collect())
}

/// Isomorphism `Υ` from quotient lead amplitudes onto the amplitudes of the
/// open graph that transform like a fixed vector of the representation.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingMap {
    upsilon: CMatrix,
    left_inverse: CMatrix,
}

impl EncodingMap {
    fn from_columns(upsilon: CMatrix) -> Self {
        let left_inverse = linalg::pseudo_inverse(&upsilon);
        EncodingMap { upsilon, left_inverse }
    }

    pub fn upsilon(&self) -> &CMatrix {
        &self.upsilon
    }

    /// Moore–Penrose left inverse `Υ⁺`.
    pub fn left_inverse(&self) -> &CMatrix {
        &self.left_inverse
    }

    pub fn dim(&self) -> usize {
        self.upsilon.ncols()
    }

    /// Same subspace with orthonormal columns (QR of `Υ`, positive diagonal of R).
    pub fn orthonormalized(&self) -> EncodingMap {
        if self.dim() == 0 {
            return self.clone();
        }
        let qr = self.upsilon.clone().qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..q.ncols() {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                let phase = d / d.norm();
                let mut col = q.column_mut(j);
                col *= phase;
            }
        }
        EncodingMap::from_columns(q)
    }

    /// `Υ⁺ S Υ`.
    pub fn conjugate(&self, s: &CMatrix) -> CMatrix {
        &self.left_inverse * s * &self.upsilon
    }

    /// `‖(I − ΥΥ⁺) S Υ‖_F`, zero when the range of `Υ` is `S`-invariant.
    pub fn invariance_residual(&self, s: &CMatrix) -> f64 {
        let su = s * &self.upsilon;
        linalg::frobenius(&(&su - &self.upsilon * (&self.left_inverse * &su)))
    }
}

/// Encoding map whose columns span `{Φ_i v}`.
///
/// The columns are the reduced row-echelon basis of that span, so the map
/// depends only on the subspace.
pub fn encoding_map(phis: &[CMatrix], v: &CVector) -> Result<EncodingMap, SymmetryError> {
    let Some(first) = phis.first() else {
        return Err(SymmetryError::DependentColumns);
    };
    if v.len() != first.ncols() {
        return Err(SymmetryError::DimensionMismatch {
            expected: first.ncols(),
            got: v.len(),
        });
    }
    let l = first.nrows();
    let mut cols = CMatrix::zeros(l, phis.len());
    for (i, phi) in phis.iter().enumerate() {
        cols.set_column(i, &(phi * v));
    }
    let max = cols.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max <= 1e-12 * v.norm().max(f64::MIN_POSITIVE) || max == 0.0 {
        return Err(SymmetryError::DependentColumns);
    }
    if linalg::rank(&cols, 1e-10) < phis.len() {
        return Err(SymmetryError::DependentColumns);
    }
    let basis = linalg::echelon_column_basis(&cols, 1e-10);
    if basis.ncols() < phis.len() {
        return Err(SymmetryError::DependentColumns);
    }
    Ok(EncodingMap::from_columns(basis))
}

/// One summand of a quotient: an irreducible representation, how many times
/// it appears, and the carrier vector used for encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientBlock {
    pub rep: MatrixRep,
    pub multiplicity: usize,
    pub v: CVector,
}

impl QuotientBlock {
    /// Single copy encoded along the first basis vector.
    pub fn first_basis(rep: MatrixRep) -> Self {
        let mut v = CVector::zeros(rep.dim());
        v[0] = linalg::ONE;
        QuotientBlock { rep, multiplicity: 1, v }
    }
}

/// Quotient of a symmetric open graph by a direct sum of irreducible
/// representations, evaluated at many `k`.
#[derive(Debug, Clone)]
pub struct Quotient {
    sys: ScatteringSystem,
    perms: Vec<CMatrix>,
    checked: Vec<usize>,
    blocks: Vec<(EncodingMap, usize)>,
}

impl Quotient {
    pub fn new(og: &OpenGraph, act: &GraphAction, blocks: &[QuotientBlock]) -> Result<Self, SymmetryError> {
        validate_action(og, act)?;
        let perms = lead_permutation_matrices(act);
        let mut encoded = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.rep.group() != &act.group {
                return Err(SymmetryError::GroupMismatch);
            }
            let norm = b.rep.character_norm();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(SymmetryError::NotIrreducible(norm));
            }
            if b.v.len() != b.rep.dim() {
                return Err(SymmetryError::DimensionMismatch {
                    expected: b.rep.dim(),
                    got: b.v.len(),
                });
            }
            let phis = intertwiner_basis(&perms, &b.rep)?;
            let enc = if phis.is_empty() {
                EncodingMap::from_columns(CMatrix::zeros(og.lead_count(), 0))
            } else {
                encoding_map(&phis, &b.v)?.orthonormalized()
            };
            encoded.push((enc, b.multiplicity));
        }
        Ok(Quotient {
            sys: ScatteringSystem::new(og)?,
            perms,
            checked: act.generator_set(),
            blocks: encoded,
        })
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|(e, n)| e.dim() * n).sum()
    }

    pub fn encodings(&self) -> impl Iterator<Item = &EncodingMap> {
        self.blocks.iter().map(|(e, _)| e)
    }

    /// Block-diagonal quotient scattering matrix at `k`.
    pub fn scattering(&self, k: C64) -> Result<CMatrix, SymmetryError> {
        let s = self.sys.s_matrix(k)?;
        self.from_full(&s)
    }

    /// Quotient of a given full scattering matrix.
    pub fn from_full(&self, s: &CMatrix) -> Result<CMatrix, SymmetryError> {
        let defect = self
            .checked
            .iter()
            .map(|&a| linalg::frobenius(&(&self.perms[a] * s - s * &self.perms[a])))
            .fold(0.0, f64::max);
        if defect > EQUIVARIANCE_TOL {
            return Err(SymmetryError::NotEquivariant(defect));
        }
        let mut parts = Vec::new();
        for (enc, n) in &self.blocks {
            let residual = enc.invariance_residual(s);
            if residual > EQUIVARIANCE_TOL {
                return Err(SymmetryError::NotInvariant(residual));
            }
            let q = enc.conjugate(s);
            parts.extend(std::iter::repeat(q).take(*n));
        }
        Ok(linalg::block_diag(&parts))
    }
}

/// `Υ⁺ S(k) Υ` for one irreducible representation and carrier vector `v`.
pub fn quotient_scattering(
    og: &OpenGraph,
    act: &GraphAction,
    rho: &MatrixRep,
    v: &CVector,
    k: C64,
) -> Result<CMatrix, SymmetryError> {
    let block = QuotientBlock {
        rep: rho.clone(),
        multiplicity: 1,
        v: v.clone(),
    };
    Quotient::new(og, act, &[block])?.scattering(k)
}

/// Direct sum of quotient blocks, each repeated by its multiplicity, in input order.
pub fn quotient_scattering_sum(
    og: &OpenGraph,
    act: &GraphAction,
    blocks: &[QuotientBlock],
    k: C64,
) -> Result<CMatrix, SymmetryError> {
    Quotient::new(og, act, blocks)?.scattering(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{attach_leads, build_graph, GraphDescription, VertexCondition};
    use crate::linalg::{c, from_real_rows};

    fn s3_star() -> (OpenGraph, GraphAction) {
        let g = build_graph(&GraphDescription::default().vertex("v", VertexCondition::neumann())).unwrap();
        let og = attach_leads(&g, &["v"; 6]).unwrap();
        let group = FiniteGroup::symmetric3();
        let perms = (0..6).map(|a| (0..6).map(|h| group.mul(a, h)).collect()).collect();
        (og, GraphAction::new(group, perms, None))
    }

    fn r2d(group: &FiniteGroup) -> MatrixRep {
        let m = |r: [[f64; 2]; 2]| from_real_rows(&[&r[0], &r[1]]);
        MatrixRep::new(
            "R_2d",
            group.clone(),
            vec![
                m([[1.0, 0.0], [0.0, 1.0]]),
                m([[-1.0, 1.0], [0.0, 1.0]]),
                m([[0.0, -1.0], [-1.0, 0.0]]),
                m([[1.0, 0.0], [1.0, -1.0]]),
                m([[0.0, -1.0], [1.0, -1.0]]),
                m([[-1.0, 1.0], [-1.0, 0.0]]),
            ],
        )
        .unwrap()
    }

    fn e1(n: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[0] = linalg::ONE;
        v
    }

    /// Action of H = {e, (1,2)} on the star, as a group of order two.
    fn h_action() -> (OpenGraph, GraphAction) {
        let (og, act) = s3_star();
        let h = FiniteGroup::cyclic(2);
        let perms = vec![act.lead_perms[0].clone(), act.lead_perms[1].clone()];
        (og, GraphAction::new(h, perms, None))
    }

    #[test]
    fn worked_example_matrices_form_a_representation() {
        let g = FiniteGroup::symmetric3();
        assert!(r2d(&g).is_irreducible());
        assert!(!MatrixRep::regular(&g).is_irreducible());
    }

    #[test]
    fn trivial_h_span_and_projection() {
        let (_, act) = h_action();
        let perms = lead_permutation_matrices(&act);
        let phis = intertwiner_basis(&perms, &MatrixRep::trivial(&act.group)).unwrap();
        assert_eq!(phis.len(), 3);
        let enc = encoding_map(&phis, &e1(1)).unwrap();
        let want = from_real_rows(&[
            &[1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 1.0, 0.0],
        ]);
        assert!(linalg::frobenius(&(enc.upsilon() - &want)) < 1e-12);
        // On the range, Υ⁺ reads off coordinates 0, 2 and 4.
        let x = &want * CVector::from_vec(vec![c(2.0, 0.0), c(-1.0, 0.5), c(0.3, 0.0)]);
        let decoded = enc.left_inverse() * &x;
        for (i, coord) in [0, 2, 4].iter().enumerate() {
            assert!((decoded[i] - x[*coord]).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_vector_is_dependent() {
        let (_, act) = h_action();
        let perms = lead_permutation_matrices(&act);
        let phis = intertwiner_basis(&perms, &MatrixRep::trivial(&act.group)).unwrap();
        assert_eq!(encoding_map(&phis, &CVector::zeros(1)), Err(SymmetryError::DependentColumns));
    }

    #[test]
    fn one_dimensional_encoding_is_unit_column() {
        let (_, act) = s3_star();
        let perms = lead_permutation_matrices(&act);
        let phis = intertwiner_basis(&perms, &MatrixRep::trivial(&act.group)).unwrap();
        assert_eq!(phis.len(), 1);
        let enc = encoding_map(&phis, &e1(1)).unwrap().orthonormalized();
        assert_eq!(enc.dim(), 1);
        assert!((enc.upsilon().column(0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quotient_goldens() {
        let (og, act) = h_action();
        let q = quotient_scattering(&og, &act, &MatrixRep::trivial(&act.group), &e1(1), c(1.0, 0.0)).unwrap();
        let want = from_real_rows(&[&[-1.0, 2.0, 2.0], &[2.0, -1.0, 2.0], &[2.0, 2.0, -1.0]]) / c(3.0, 0.0);
        assert!(linalg::frobenius(&(q - want)) < 1e-12);

        let (og, act) = s3_star();
        let g = act.group.clone();
        let q = quotient_scattering(&og, &act, &r2d(&g), &e1(2), c(1.0, 0.0)).unwrap();
        assert!(linalg::frobenius(&(q + linalg::identity(2))) < 1e-12);
        let q = quotient_scattering(&og, &act, &MatrixRep::trivial(&g), &e1(1), c(1.0, 0.0)).unwrap();
        assert!((q[(0, 0)] - 1.0).norm() < 1e-12);

        let blocks = [
            QuotientBlock::first_basis(MatrixRep::trivial(&g)),
            QuotientBlock::first_basis(r2d(&g)),
        ];
        let q = quotient_scattering_sum(&og, &act, &blocks, c(1.0, 0.0)).unwrap();
        let want = from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, -1.0]]);
        assert!(linalg::frobenius(&(q - want)) < 1e-12);
    }

    #[test]
    fn sums_empty_and_repeated() {
        let (og, act) = s3_star();
        assert_eq!(quotient_scattering_sum(&og, &act, &[], c(1.0, 0.0)).unwrap().shape(), (0, 0));
        let mut b = QuotientBlock::first_basis(MatrixRep::trivial(&act.group));
        b.multiplicity = 2;
        let q = quotient_scattering_sum(&og, &act, &[b], c(1.0, 0.0)).unwrap();
        assert!(linalg::frobenius(&(q - linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn reducible_rep_rejected() {
        let (og, act) = s3_star();
        let reg = MatrixRep::regular(&act.group);
        assert!(matches!(
            quotient_scattering(&og, &act, &reg, &e1(6), c(1.0, 0.0)),
            Err(SymmetryError::NotIrreducible(_))
        ));
    }

    #[test]
    fn regular_rep_dimension_count() {
        let (_, act) = s3_star();
        let perms = lead_permutation_matrices(&act);
        let reg = MatrixRep::regular(&act.group);
        let phis = intertwiner_basis(&perms, &reg).unwrap();
        assert_eq!(phis.len() * reg.dim(), 36);
    }

    #[test]
    fn r2d_second_span_vector_is_reproduced() {
        let (_, act) = s3_star();
        let perms = lead_permutation_matrices(&act);
        let phis = intertwiner_basis(&perms, &r2d(&act.group)).unwrap();
        assert_eq!(phis.len(), 2);
        let enc = encoding_map(&phis, &e1(2)).unwrap();
        let second = from_real_rows(&[&[0.0], &[1.0], &[-1.0], &[0.0], &[-1.0], &[1.0]]);
        let p = linalg::projector(enc.upsilon());
        assert!(linalg::frobenius(&(&p * &second - &second)) < 1e-12);
    }
}
