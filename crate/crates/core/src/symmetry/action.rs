//! Permutation actions of a finite group on the leads and edges of an open graph.

use std::collections::HashMap;

use crate::graph::{bond_table, Channel, Direction, OpenGraph};
use crate::linalg::{self, c, CMatrix};
use crate::scattering::ScatteringSystem;

use super::{FiniteGroup, SymmetryError};

/// Image of an edge under a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeImage {
    pub edge: usize,
    /// The image runs `to → from` of the target edge.
    pub reversed: bool,
}

/// A group acting on an open graph by permutations.
///
/// `lead_perms[g][i]` is the index of the lead that `g` sends lead `i` to.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphAction {
    pub group: FiniteGroup,
    pub lead_perms: Vec<Vec<usize>>,
    pub edge_perms: Option<Vec<Vec<EdgeImage>>>,
}

impl GraphAction {
    pub fn new(group: FiniteGroup, lead_perms: Vec<Vec<usize>>, edge_perms: Option<Vec<Vec<EdgeImage>>>) -> Self {
        GraphAction {
            group,
            lead_perms,
            edge_perms,
        }
    }

    /// Elements whose action must be checked; generators when declared.
    fn check_elements(&self) -> Vec<usize> {
        if self.group.generators().is_empty() {
            (0..self.group.order()).collect()
        } else {
            self.group.generators().to_vec()
        }
    }

    pub fn generator_set(&self) -> Vec<usize> {
        self.check_elements()
    }

    /// Action of the subgroup on `elements`.
    pub fn restrict(&self, elements: &[usize]) -> Result<GraphAction, SymmetryError> {
        let (group, parent) = self.group.subgroup(elements)?;
        let lead_perms = parent.iter().map(|&p| self.lead_perms[p].clone()).collect();
        let edge_perms = self
            .edge_perms
            .as_ref()
            .map(|e| parent.iter().map(|&p| e[p].clone()).collect());
        Ok(GraphAction::new(group, lead_perms, edge_perms))
    }
}

fn check_permutation(perm: &[usize], n: usize, what: &str, element: &str) -> Result<(), SymmetryError> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(SymmetryError::NotHomomorphism(format!(
            "{what} map of `{element}` has {} entries, expected {n}",
            perm.len()
        )));
    }
    for &x in perm {
        if x >= n || seen[x] {
            return Err(SymmetryError::NotHomomorphism(format!(
                "{what} map of `{element}` is not a bijection"
            )));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Checks that the action is a homomorphism into the permutations of the
/// graph and preserves edge lengths and vertex conditions.
pub fn validate_action(og: &OpenGraph, act: &GraphAction) -> Result<(), SymmetryError> {
    let g = &act.group;
    let n = g.order();
    let nl = og.lead_count();
    let graph = og.graph();
    let ne = graph.edges().len();
    if act.lead_perms.len() != n {
        return Err(SymmetryError::NotHomomorphism(format!(
            "{} lead permutations for a group of order {n}",
            act.lead_perms.len()
        )));
    }
    for (a, p) in act.lead_perms.iter().enumerate() {
        check_permutation(p, nl, "lead", g.name(a))?;
    }
    let edge_perms = match (&act.edge_perms, ne) {
        (Some(e), _) => Some(e),
        (None, 0) => None,
        (None, _) => return Err(SymmetryError::MissingEdgeAction),
    };
    if let Some(ep) = edge_perms {
        if ep.len() != n {
            return Err(SymmetryError::NotHomomorphism(format!(
                "{} edge permutations for a group of order {n}",
                ep.len()
            )));
        }
        for (a, p) in ep.iter().enumerate() {
            let targets: Vec<usize> = p.iter().map(|im| im.edge).collect();
            check_permutation(&targets, ne, "edge", g.name(a))?;
        }
    }
    let bonds = |a: usize| -> Vec<usize> { bond_images(act, a, ne) };
    for a in 0..n {
        for b in 0..n {
            let ab = g.mul(a, b);
            let composed: Vec<usize> = act.lead_perms[b].iter().map(|&x| act.lead_perms[a][x]).collect();
            let bond_ok = edge_perms.is_none() || {
                let (ba, bb, bab) = (bonds(a), bonds(b), bonds(ab));
                bb.iter().map(|&x| ba[x]).eq(bab.iter().copied())
            };
            if composed != act.lead_perms[ab] || !bond_ok {
                return Err(SymmetryError::NotHomomorphism(format!(
                    "action of {} * {} differs from action of {}",
                    g.name(a),
                    g.name(b),
                    g.name(ab)
                )));
            }
        }
    }
    if let Some(ep) = edge_perms {
        for (a, p) in ep.iter().enumerate() {
            for (e, im) in p.iter().enumerate() {
                let (l1, l2) = (graph.edges()[e].length, graph.edges()[im.edge].length);
                if (l1 - l2).abs() > 1e-12 * l1.max(l2) {
                    return Err(SymmetryError::LengthViolation {
                        element: g.name(a).to_string(),
                        edge: graph.edges()[e].id.clone(),
                    });
                }
            }
        }
    }

    let table = bond_table(og);
    let sys = ScatteringSystem::new(og)?;
    let sigmas = [c(1.3, 0.0), c(2.9, 0.0)]
        .iter()
        .map(|&k| sys.channel_sigma(k))
        .collect::<Result<Vec<_>, _>>()?;
    for a in act.check_elements() {
        let chan = channel_images(act, a, &table, nl);
        // Vertex map induced by channel ownership.
        let mut vmap: HashMap<usize, usize> = HashMap::new();
        for (ch, &img) in chan.iter().enumerate() {
            let (v, w) = (table.origin(ch), table.origin(img));
            if *vmap.entry(v).or_insert(w) != w {
                return Err(SymmetryError::NotHomomorphism(format!(
                    "`{}` sends the channels of vertex `{}` to different vertices",
                    g.name(a),
                    graph.vertices()[v].id
                )));
            }
        }
        for v in 0..graph.vertices().len() {
            let local = table.vertex_channels(v);
            let same = sigmas.iter().all(|s| {
                local.iter().all(|&i| {
                    local
                        .iter()
                        .all(|&j| (s[(chan[i], chan[j])] - s[(i, j)]).norm() <= 1e-12)
                })
            });
            if !same {
                return Err(SymmetryError::ConditionViolation {
                    element: g.name(a).to_string(),
                    vertex: graph.vertices()[v].id.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Image of each directed bond (edge-major, forward before reverse) under `a`.
fn bond_images(act: &GraphAction, a: usize, ne: usize) -> Vec<usize> {
    let Some(ep) = &act.edge_perms else {
        return Vec::new();
    };
    let mut out = vec![0; 2 * ne];
    for (e, im) in ep[a].iter().enumerate() {
        let (f, r) = (2 * im.edge, 2 * im.edge + 1);
        out[2 * e] = if im.reversed { r } else { f };
        out[2 * e + 1] = if im.reversed { f } else { r };
    }
    out
}

/// Image of every channel under `a`, in [`crate::graph::BondTable`] indexing.
fn channel_images(act: &GraphAction, a: usize, table: &crate::graph::BondTable, nl: usize) -> Vec<usize> {
    let ne = table.bond_count() / 2;
    let bonds = bond_images(act, a, ne);
    (0..table.channel_count())
        .map(|ch| match table.channel(ch) {
            Channel::Lead(i) => act.lead_perms[a][i],
            Channel::Bond { edge, dir } => {
                let b = 2 * edge + usize::from(dir == Direction::Reverse);
                nl + bonds[b]
            }
        })
        .collect()
}

/// `P(g)` for every element, with `P(g) e_j = e_{g(j)}`.
pub fn lead_permutation_matrices(act: &GraphAction) -> Vec<CMatrix> {
    act.lead_perms.iter().map(|p| linalg::permutation_matrix(p)).collect()
}
