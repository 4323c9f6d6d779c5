//! Finite groups given by multiplication tables.

use std::collections::BTreeSet;

use super::SymmetryError;

/// A finite group with named elements; element 0 is the identity and
/// `table[a][b]` is the index of `a·b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity.
    ///
    /// Associativity is checked exhaustively up to order 64 and on a fixed
    /// stride of triples beyond.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = names.len();
        let bad = |m: &str| Err(SymmetryError::InvalidGroup(m.to_string()));
        if n == 0 {
            return bad("no elements");
        }
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return bad("duplicate element names");
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("multiplication table must be n x n with entries in 0..n");
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return bad("first element is not the identity");
            }
            let row: BTreeSet<_> = table[a].iter().collect();
            let col: BTreeSet<_> = (0..n).map(|b| &table[b][a]).collect();
            if row.len() != n || col.len() != n {
                return bad("table is not a Latin square");
            }
        }
        let stride = if n <= 64 { 1 } else { 7 };
        for a in (0..n).step_by(stride) {
            for b in 0..n {
                for c in (0..n).step_by(stride) {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("multiplication is not associative");
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == 0).expect("Latin square has an inverse"))
            .collect();
        if generators.iter().any(|&g| g >= n) {
            return bad("generator index out of range");
        }
        Ok(FiniteGroup {
            names,
            table,
            inverses,
            generators,
        })
    }

    /// Group of permutations of `0..d`; `perms[0]` must be the identity.
    ///
    /// Products compose right to left: `(a·b)(x) = a(b(x))`.
    pub fn from_permutations(names: Vec<String>, perms: &[Vec<usize>]) -> Result<Self, SymmetryError> {
        if names.len() != perms.len() {
            return Err(SymmetryError::InvalidGroup("one name per permutation".into()));
        }
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab: Vec<usize> = b.iter().map(|&x| a[x]).collect();
                        perms.iter().position(|p| *p == ab).ok_or_else(|| {
                            SymmetryError::InvalidGroup("permutations are not closed under composition".into())
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::new(names, table, Vec::new())
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SymmetryError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SymmetryError::UnknownElement(name.to_string()))
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn with_generators(mut self, generators: Vec<usize>) -> Result<Self, SymmetryError> {
        if generators.iter().any(|&g| g >= self.order()) {
            return Err(SymmetryError::InvalidGroup("generator index out of range".into()));
        }
        self.generators = generators;
        Ok(self)
    }

    /// `x⁻¹ g x`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(self.inverse(x), g), x)
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut classes = Vec::new();
        for g in 0..self.order() {
            if seen[g] {
                continue;
            }
            let class: BTreeSet<usize> = (0..self.order()).map(|x| self.conjugate(g, x)).collect();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    /// Checks that `elements` is a subgroup.
    pub fn check_subgroup(&self, elements: &[usize]) -> Result<(), SymmetryError> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if set.len() != elements.len() {
            return Err(SymmetryError::NotSubgroup("repeated element".into()));
        }
        if let Some(&x) = set.iter().find(|&&x| x >= self.order()) {
            return Err(SymmetryError::NotSubgroup(format!("index {x} out of range")));
        }
        if !set.contains(&0) {
            return Err(SymmetryError::NotSubgroup("identity missing".into()));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(SymmetryError::NotSubgroup(format!(
                        "{} * {} leaves the set",
                        self.names[a], self.names[b]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The subgroup on `elements` as a group of its own, with elements in
    /// ascending parent order (so the identity stays first), plus the map from
    /// subgroup index to parent index.
    pub fn subgroup(&self, elements: &[usize]) -> Result<(FiniteGroup, Vec<usize>), SymmetryError> {
        self.check_subgroup(elements)?;
        let parent: Vec<usize> = elements.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let local = |x: usize| parent.iter().position(|&p| p == x).expect("closed under products");
        let names = parent.iter().map(|&p| self.names[p].clone()).collect();
        let table = parent
            .iter()
            .map(|&a| parent.iter().map(|&b| local(self.mul(a, b))).collect())
            .collect();
        Ok((FiniteGroup::new(names, table, Vec::new())?, parent))
    }

    /// Symmetric group on three letters, elements
    /// `e, (1,2), (1,3), (2,3), (1,2,3), (1,3,2)`.
    pub fn symmetric3() -> Self {
        let names = ["e", "(1,2)", "(1,3)", "(2,3)", "(1,2,3)", "(1,3,2)"];
        let perms = vec![
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![2, 1, 0],
            vec![0, 2, 1],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        FiniteGroup::from_permutations(names.iter().map(|s| s.to_string()).collect(), &perms)
            .expect("S3 is a group")
            .with_generators(vec![1, 4])
            .expect("valid generators")
    }

    /// Symmetries of the square with corners `(1,1), (−1,1), (−1,−1), (1,−1)`:
    /// `e, s, s2, s3` (rotations by multiples of π/2 counter-clockwise),
    /// `rx, ry` (reflections in the coordinate axes), `ru, rv` (in the diagonals
    /// `y = x` and `y = −x`).
    pub fn dihedral4() -> Self {
        let names = ["e", "s", "s2", "s3", "rx", "ry", "ru", "rv"];
        let perms = vec![
            vec![0, 1, 2, 3],
            vec![1, 2, 3, 0],
            vec![2, 3, 0, 1],
            vec![3, 0, 1, 2],
            vec![3, 2, 1, 0],
            vec![1, 0, 3, 2],
            vec![0, 3, 2, 1],
            vec![2, 1, 0, 3],
        ];
        FiniteGroup::from_permutations(names.iter().map(|s| s.to_string()).collect(), &perms)
            .expect("D4 is a group")
            .with_generators(vec![1, 4])
            .expect("valid generators")
    }

    /// Cyclic group `Z_n` with elements `0..n` named by residue.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(names, table, if n > 1 { vec![1] } else { Vec::new() }).expect("cyclic group")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_products() {
        let g = FiniteGroup::symmetric3();
        let ix = |n: &str| g.index_of(n).unwrap();
        assert_eq!(g.mul(ix("(1,2)"), ix("(1,3)")), ix("(1,3,2)"));
        assert_eq!(g.mul(ix("(1,2)"), ix("(2,3)")), ix("(1,2,3)"));
        assert_eq!(g.inverse(ix("(1,2,3)")), ix("(1,3,2)"));
        assert_eq!(g.conjugacy_classes().len(), 3);
    }

    #[test]
    fn d4_structure() {
        let g = FiniteGroup::dihedral4();
        let ix = |n: &str| g.index_of(n).unwrap();
        assert_eq!(g.mul(ix("rx"), ix("ry")), ix("s2"));
        assert_eq!(g.mul(ix("ru"), ix("rv")), ix("s2"));
        assert_eq!(g.conjugacy_classes().len(), 5);
        g.check_subgroup(&[0, ix("rx"), ix("ry"), ix("s2")]).unwrap();
        g.check_subgroup(&[0, ix("ru"), ix("rv"), ix("s2")]).unwrap();
        assert!(g.check_subgroup(&[0, ix("rx"), ix("ru")]).is_err());
    }

    #[test]
    fn rejects_non_group() {
        let names = vec!["e".to_string(), "a".to_string()];
        let table = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::new(names, table, vec![]).is_err());
    }

    #[test]
    fn cyclic_group() {
        let g = FiniteGroup::cyclic(5);
        assert_eq!(g.mul(3, 4), 2);
        assert_eq!(g.inverse(2), 3);
    }
}
