//! Symmetry files: a group table, its action on an open graph, and named representations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::{from_entries, Entry};
use super::{parse_json, read_text, IoError};
use crate::graph::OpenGraph;
use crate::linalg::{self, C64, CMatrix};
use crate::symmetry::{ClassFunction, EdgeImage, FiniteGroup, GraphAction, MatrixRep, SymmetryError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeImageSpec {
    pub edge: String,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub name: String,
    /// Elements of the subgroup the representation lives on; the whole group when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<String>>,
    pub matrices: BTreeMap<String, Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryFile {
    pub elements: Vec<String>,
    /// `table[i][j]` names the product `elements[i] · elements[j]`.
    pub table: Vec<Vec<String>>,
    #[serde(default)]
    pub generators: Vec<String>,
    /// Element name to a map from lead id to image lead id.
    #[serde(default)]
    pub lead_permutations: BTreeMap<String, BTreeMap<String, String>>,
    /// Element name to a map from edge id to its image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_permutations: Option<BTreeMap<String, BTreeMap<String, EdgeImageSpec>>>,
    #[serde(default)]
    pub representations: Vec<RepresentationSpec>,
}

/// A representation resolved against its group, with the parent indices of
/// that group when it is a proper subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRep {
    pub rep: MatrixRep,
    pub subgroup: Option<Vec<usize>>,
}

impl ResolvedRep {
    /// Character on the full group, induced when the representation lives on a subgroup.
    pub fn character_on(&self, group: &FiniteGroup) -> Result<ClassFunction, SymmetryError> {
        match &self.subgroup {
            None => Ok(self.rep.character()),
            Some(parent) => {
                let chi: Vec<C64> = self.rep.matrices().iter().map(|m| m.trace()).collect();
                crate::symmetry::induced_character(group, parent, &chi)
            }
        }
    }
}

pub fn parse_symmetry_str(text: &str, source_name: &str) -> Result<SymmetryFile, IoError> {
    Ok(parse_json(text, source_name)?)
}

pub fn parse_symmetry_file(path: &Path) -> Result<SymmetryFile, IoError> {
    parse_symmetry_str(&read_text(path)?, &path.display().to_string())
}

impl SymmetryFile {
    fn index(&self, name: &str) -> Result<usize, SymmetryError> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| SymmetryError::UnknownElement(name.to_string()))
    }

    pub fn group(&self) -> Result<FiniteGroup, SymmetryError> {
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|n| self.index(n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let generators = self.generators.iter().map(|n| self.index(n)).collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::new(self.elements.clone(), table, generators)
    }

    /// Action on `og`. Elements without an explicit permutation get one
    /// generated by products of the listed ones.
    pub fn action(&self, og: &OpenGraph) -> Result<GraphAction, SymmetryError> {
        let group = self.group()?;
        let n = group.order();
        let lead = |id: &str| {
            og.lead_index(id)
                .ok_or_else(|| SymmetryError::NotHomomorphism(format!("unknown lead `{id}`")))
        };
        let mut perms: Vec<Option<Vec<usize>>> = vec![None; n];
        perms[0] = Some((0..og.lead_count()).collect());
        for (name, map) in &self.lead_permutations {
            let a = self.index(name)?;
            let mut p: Vec<usize> = (0..og.lead_count()).collect();
            for (from, to) in map {
                p[lead(from)?] = lead(to)?;
            }
            perms[a] = Some(p);
        }
        let edges = og.graph().edges();
        let edge = |id: &str| {
            edges
                .iter()
                .position(|e| e.id == id)
                .ok_or_else(|| SymmetryError::NotHomomorphism(format!("unknown edge `{id}`")))
        };
        let mut edge_perms: Option<Vec<Option<Vec<EdgeImage>>>> = None;
        if let Some(spec) = &self.edge_permutations {
            let ident: Vec<EdgeImage> = (0..edges.len()).map(|e| EdgeImage { edge: e, reversed: false }).collect();
            let mut ep = vec![None; n];
            ep[0] = Some(ident.clone());
            for (name, map) in spec {
                let a = self.index(name)?;
                let mut p = ident.clone();
                for (from, img) in map {
                    p[edge(from)?] = EdgeImage {
                        edge: edge(&img.edge)?,
                        reversed: img.reversed,
                    };
                }
                ep[a] = Some(p);
            }
            edge_perms = Some(ep);
        }
        close_under_products(&group, &mut perms, |p, q| q.iter().map(|&i| p[i]).collect());
        if let Some(ep) = edge_perms.as_mut() {
            close_under_products(&group, ep, |p: &Vec<EdgeImage>, q: &Vec<EdgeImage>| {
                q.iter()
                    .map(|img| {
                        let outer = p[img.edge];
                        EdgeImage {
                            edge: outer.edge,
                            reversed: outer.reversed ^ img.reversed,
                        }
                    })
                    .collect()
            });
        }
        let missing = |a: usize| SymmetryError::NotHomomorphism(format!("no permutation for `{}`", group.name(a)));
        let lead_perms = perms
            .into_iter()
            .enumerate()
            .map(|(a, p)| p.ok_or_else(|| missing(a)))
            .collect::<Result<Vec<_>, _>>()?;
        let edge_perms = edge_perms
            .map(|ep| {
                ep.into_iter()
                    .enumerate()
                    .map(|(a, p)| p.ok_or_else(|| missing(a)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(GraphAction::new(group, lead_perms, edge_perms))
    }

    pub fn representation_names(&self) -> Vec<&str> {
        self.representations.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn representation(&self, name: &str) -> Result<ResolvedRep, SymmetryError> {
        let spec = self
            .representations
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| SymmetryError::UnknownElement(format!("representation `{name}`")))?;
        let group = self.group()?;
        let (rep_group, parent) = match &spec.subgroup {
            None => (group.clone(), None),
            Some(names) => {
                let idx = names.iter().map(|n| self.index(n)).collect::<Result<Vec<_>, _>>()?;
                let (h, parent) = group.subgroup(&idx)?;
                (h, Some(parent))
            }
        };
        let mut matrices: Vec<CMatrix> = Vec::with_capacity(rep_group.order());
        for el in rep_group.names() {
            let rows = spec
                .matrices
                .get(el)
                .ok_or_else(|| SymmetryError::UnknownElement(format!("`{name}` has no matrix for `{el}`")))?;
            matrices.push(from_entries(rows).map_err(|m| SymmetryError::NotHomomorphism(format!("`{name}`: {m}")))?);
        }
        if let Some(extra) = spec.matrices.keys().find(|k| !rep_group.names().contains(k)) {
            return Err(SymmetryError::UnknownElement(format!("`{name}` lists `{extra}` outside its group")));
        }
        Ok(ResolvedRep {
            rep: MatrixRep::new(name, rep_group, matrices)?,
            subgroup: parent,
        })
    }
}

/// Fills `None` slots with `perm(a·b) = perm(a) ∘ perm(b)` until nothing changes.
fn close_under_products<T: Clone>(group: &FiniteGroup, slots: &mut [Option<T>], compose: impl Fn(&T, &T) -> T) {
    loop {
        let mut changed = false;
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a, b);
                if slots[ab].is_none() {
                    if let (Some(p), Some(q)) = (&slots[a], &slots[b]) {
                        slots[ab] = Some(compose(p, q));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Carrier vector `e_1` of length `n`.
pub fn first_basis_vector(n: usize) -> linalg::CVector {
    let mut v = linalg::CVector::zeros(n);
    if n > 0 {
        v[0] = linalg::ONE;
    }
    v
}
