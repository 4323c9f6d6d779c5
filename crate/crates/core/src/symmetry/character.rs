//! Class functions, induced characters and character comparisons.

use crate::linalg::{c, C64, CMatrix};

use super::{FiniteGroup, SymmetryError};

/// Default tolerance for [`characters_equal`].
pub const CHARACTER_TOL: f64 = 1e-9;

/// A function on group elements, constant on conjugacy classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFunction {
    group: FiniteGroup,
    values: Vec<C64>,
}

impl ClassFunction {
    pub fn new(group: FiniteGroup, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), group.order(), "one value per group element");
        ClassFunction { group, values }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, a: usize) -> C64 {
        self.values[a]
    }

    /// Values on conjugacy class representatives, in class order.
    pub fn on_classes(&self) -> Vec<C64> {
        self.group.conjugacy_classes().iter().map(|cl| self.values[cl[0]]).collect()
    }

    /// `<a, b> = (1/|G|) Σ conj(a(g)) b(g)`.
    pub fn inner(&self, other: &ClassFunction) -> Result<C64, SymmetryError> {
        if self.group != other.group {
            return Err(SymmetryError::GroupMismatch);
        }
        let sum: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(sum / self.group.order() as f64)
    }

    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction, SymmetryError> {
        if self.group != other.group {
            return Err(SymmetryError::GroupMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ClassFunction::new(self.group.clone(), values))
    }

    /// Character of a permutation action given by matrices: fixed-point counts.
    pub fn of_permutations(group: &FiniteGroup, perms: &[CMatrix]) -> ClassFunction {
        ClassFunction::new(group.clone(), perms.iter().map(|p| p.trace()).collect())
    }

    pub fn regular(group: &FiniteGroup) -> ClassFunction {
        let mut values = vec![c(0.0, 0.0); group.order()];
        values[0] = c(group.order() as f64, 0.0);
        ClassFunction::new(group.clone(), values)
    }
}

/// Character of `Ind_H^G R` from the character `chi` of `R`.
///
/// `subgroup` lists the elements of `H` and `chi[i]` is the value on
/// `subgroup[i]`. Uses `χ(g) = (1/|H|) Σ_{x ∈ G, x⁻¹gx ∈ H} χ_R(x⁻¹gx)`.
pub fn induced_character(group: &FiniteGroup, subgroup: &[usize], chi: &[C64]) -> Result<ClassFunction, SymmetryError> {
    group.check_subgroup(subgroup)?;
    if chi.len() != subgroup.len() {
        return Err(SymmetryError::DimensionMismatch {
            expected: subgroup.len(),
            got: chi.len(),
        });
    }
    let mut on_h = vec![None; group.order()];
    for (&h, &v) in subgroup.iter().zip(chi) {
        on_h[h] = Some(v);
    }
    let values = (0..group.order())
        .map(|g| {
            let sum: C64 = (0..group.order())
                .filter_map(|x| on_h[group.conjugate(g, x)])
                .sum();
            sum / subgroup.len() as f64
        })
        .collect();
    Ok(ClassFunction::new(group.clone(), values))
}

/// Max-norm equality on conjugacy classes.
pub fn characters_equal(a: &ClassFunction, b: &ClassFunction, tol: f64) -> Result<bool, SymmetryError> {
    if a.group != b.group {
        return Err(SymmetryError::GroupMismatch);
    }
    Ok(a.on_classes()
        .iter()
        .zip(b.on_classes())
        .all(|(x, y)| (x - y).norm() <= tol))
}
