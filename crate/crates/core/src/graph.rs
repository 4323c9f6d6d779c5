//! Metric graphs, leads, and directed-bond bookkeeping.
//!
//! A [`MetricGraph`] is a validated set of vertices (each carrying one
//! [`VertexCondition`]) and edges with positive lengths. Attaching leads yields
//! an [`OpenGraph`], whose lead order fixes the coordinate order of every
//! amplitude vector and scattering matrix downstream. [`BondTable`] turns
//! either into the channel indexing used by the solvers.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::matrix as cmatrix_serde;
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge `{edge}` has non-positive length {length}")]
    NonPositiveLength { edge: String, length: f64 },
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("vertex `{vertex}` has degree {degree} but its condition is sized {size}")]
    ConditionDegreeMismatch { vertex: String, degree: usize, size: usize },
    #[error("linear_ab condition at vertex `{vertex}`: [A|B] has rank {rank} < {degree}")]
    RankDeficientAB { vertex: String, rank: usize, degree: usize },
    #[error("fixed_unitary condition at vertex `{vertex}` is not unitary (defect {defect:.3e})")]
    NotUnitary { vertex: String, defect: f64 },
    #[error("malformed condition at vertex `{vertex}`: {reason}")]
    MalformedCondition { vertex: String, reason: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("an open graph needs at least one lead")]
    NoLeads,
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
}

/// Vertex condition, either in amplitude form or as linear equations on
/// values and outgoing derivatives.
///
/// Sized variants index their rows and columns by the channels of the vertex
/// in [`BondTable`] order: attached leads first (in lead order), then edge
/// ends by edge position, forward end before reverse end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum VertexCondition {
    Neumann {},
    Dirichlet {},
    /// `A f(v) + B f'(v) = 0`, derivatives taken away from the vertex.
    LinearAb {
        #[serde(with = "cmatrix_serde")]
        a: CMatrix,
        #[serde(with = "cmatrix_serde")]
        b: CMatrix,
    },
    FixedUnitary {
        #[serde(with = "cmatrix_serde")]
        sigma: CMatrix,
    },
    Dft { degree: usize },
}

impl VertexCondition {
    pub fn neumann() -> Self {
        VertexCondition::Neumann {}
    }

    pub fn dirichlet() -> Self {
        VertexCondition::Dirichlet {}
    }

    /// Size fixed by the payload, `None` for conditions that adapt to the degree.
    pub fn fixed_size(&self) -> Option<usize> {
        match self {
            VertexCondition::Neumann {} | VertexCondition::Dirichlet {} => None,
            VertexCondition::LinearAb { a, .. } => Some(a.nrows()),
            VertexCondition::FixedUnitary { sigma } => Some(sigma.nrows()),
            VertexCondition::Dft { degree } => Some(*degree),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            VertexCondition::Neumann {} => "neumann",
            VertexCondition::Dirichlet {} => "dirichlet",
            VertexCondition::LinearAb { .. } => "linear_ab",
            VertexCondition::FixedUnitary { .. } => "fixed_unitary",
            VertexCondition::Dft { .. } => "dft",
        }
    }

    fn validate(&self, vertex: &str, degree: usize) -> Result<(), GraphError> {
        let malformed = |reason: &str| GraphError::MalformedCondition {
            vertex: vertex.to_string(),
            reason: reason.to_string(),
        };
        match self {
            VertexCondition::LinearAb { a, b } => {
                if !a.is_square() || a.shape() != b.shape() {
                    return Err(malformed("A and B must be square of equal size"));
                }
            }
            VertexCondition::FixedUnitary { sigma } if !sigma.is_square() => {
                return Err(malformed("sigma must be square"));
            }
            _ => {}
        }
        if let Some(size) = self.fixed_size() {
            if size != degree {
                return Err(GraphError::ConditionDegreeMismatch {
                    vertex: vertex.to_string(),
                    degree,
                    size,
                });
            }
        }
        match self {
            VertexCondition::LinearAb { a, b } => {
                let mut ab = CMatrix::zeros(degree, 2 * degree);
                ab.view_mut((0, 0), (degree, degree)).copy_from(a);
                ab.view_mut((0, degree), (degree, degree)).copy_from(b);
                let rank = linalg::rank(&ab, 1e-12);
                if rank < degree {
                    return Err(GraphError::RankDeficientAB {
                        vertex: vertex.to_string(),
                        rank,
                        degree,
                    });
                }
            }
            VertexCondition::FixedUnitary { sigma } => {
                let defect = linalg::unitarity_defect(sigma);
                if defect > crate::vertex::UNITARITY_TOL {
                    return Err(GraphError::NotUnitary {
                        vertex: vertex.to_string(),
                        defect,
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    pub condition: VertexCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadSpec {
    pub id: String,
    pub at: String,
}

/// Graph description record, the in-memory form of a graph file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDescription {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub leads: Vec<LeadSpec>,
}

impl GraphDescription {
    pub fn vertex(mut self, id: &str, condition: VertexCondition) -> Self {
        self.vertices.push(VertexSpec {
            id: id.to_string(),
            condition,
        });
        self
    }

    pub fn edge(mut self, id: &str, from: &str, to: &str, length: f64) -> Self {
        self.edges.push(EdgeSpec {
            id: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
            length,
        });
        self
    }

    pub fn lead(mut self, id: &str, at: &str) -> Self {
        self.leads.push(LeadSpec {
            id: id.to_string(),
            at: at.to_string(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub condition: VertexCondition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lead {
    pub id: String,
    pub at: usize,
}

/// A validated metric graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

/// Builds a [`MetricGraph`] from a description.
///
/// Sized conditions are checked against the degree the vertex has once the
/// leads listed in the description are attached, so a graph file carries the
/// conditions of its open extension.
pub fn build_graph(desc: &GraphDescription) -> Result<MetricGraph, GraphError> {
    if desc.vertices.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let mut index = HashMap::new();
    for (i, v) in desc.vertices.iter().enumerate() {
        if index.insert(v.id.clone(), i).is_some() {
            return Err(GraphError::DuplicateId {
                kind: "vertex",
                id: v.id.clone(),
            });
        }
    }
    let mut edge_ids = HashSet::new();
    let mut edges = Vec::with_capacity(desc.edges.len());
    for e in &desc.edges {
        if !edge_ids.insert(e.id.as_str()) {
            return Err(GraphError::DuplicateId {
                kind: "edge",
                id: e.id.clone(),
            });
        }
        if !(e.length > 0.0) || !e.length.is_finite() {
            return Err(GraphError::NonPositiveLength {
                edge: e.id.clone(),
                length: e.length,
            });
        }
        let endpoint = |name: &String| {
            index.get(name).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                edge: e.id.clone(),
                vertex: name.clone(),
            })
        };
        edges.push(Edge {
            id: e.id.clone(),
            from: endpoint(&e.from)?,
            to: endpoint(&e.to)?,
            length: e.length,
        });
    }
    let graph = MetricGraph {
        vertices: desc
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id.clone(),
                condition: v.condition.clone(),
            })
            .collect(),
        edges,
        index,
    };
    let mut extra = vec![0; graph.vertices.len()];
    for l in &desc.leads {
        let at = graph.vertex_index(&l.at)?;
        extra[at] += 1;
    }
    graph.check_conditions(&extra)?;
    Ok(graph)
}

impl MetricGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    /// Number of edge ends at each vertex; a self-loop counts twice.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        deg
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    fn check_conditions(&self, extra: &[usize]) -> Result<(), GraphError> {
        for ((v, d), x) in self.vertices.iter().zip(self.edge_degrees()).zip(extra) {
            v.condition.validate(&v.id, d + x)?;
        }
        Ok(())
    }

    /// Copy with every edge length multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> MetricGraph {
        assert!(factor > 0.0, "scale factor must be positive");
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= factor;
        }
        g
    }

    pub fn description(&self) -> GraphDescription {
        GraphDescription {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexSpec {
                    id: v.id.clone(),
                    condition: v.condition.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    from: self.vertices[e.from].id.clone(),
                    to: self.vertices[e.to].id.clone(),
                    length: e.length,
                })
                .collect(),
            leads: Vec::new(),
        }
    }
}

/// A metric graph with leads to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenGraph {
    graph: MetricGraph,
    leads: Vec<Lead>,
}

/// Attaches one lead per entry of `attachments`, in that order, keeping every
/// vertex condition as it is.
pub fn attach_leads(g: &MetricGraph, attachments: &[&str]) -> Result<OpenGraph, GraphError> {
    attach_leads_with(g, attachments, &[])
}

/// Like [`attach_leads`], replacing the conditions of the listed vertices.
///
/// Attaching leads generally changes the vertex conditions at the attachment
/// vertices; vertices not listed in `overrides` keep theirs verbatim.
pub fn attach_leads_with(
    g: &MetricGraph,
    attachments: &[&str],
    overrides: &[(&str, VertexCondition)],
) -> Result<OpenGraph, GraphError> {
    if attachments.is_empty() {
        return Err(GraphError::NoLeads);
    }
    let mut graph = g.clone();
    for (id, cond) in overrides {
        let i = graph.vertex_index(id)?;
        graph.vertices[i].condition = cond.clone();
    }
    let mut leads = Vec::with_capacity(attachments.len());
    let mut extra = vec![0; graph.vertices.len()];
    for (n, at) in attachments.iter().enumerate() {
        let i = graph.vertex_index(at)?;
        extra[i] += 1;
        leads.push(Lead {
            id: format!("l{n}"),
            at: i,
        });
    }
    graph.check_conditions(&extra)?;
    Ok(OpenGraph { graph, leads })
}

impl OpenGraph {
    /// Builds and validates the open graph described by `desc`, keeping lead ids.
    pub fn from_description(desc: &GraphDescription) -> Result<OpenGraph, GraphError> {
        let graph = build_graph(desc)?;
        if desc.leads.is_empty() {
            return Err(GraphError::NoLeads);
        }
        let mut seen = HashSet::new();
        let mut leads = Vec::with_capacity(desc.leads.len());
        for l in &desc.leads {
            if !seen.insert(l.id.as_str()) {
                return Err(GraphError::DuplicateId {
                    kind: "lead",
                    id: l.id.clone(),
                });
            }
            leads.push(Lead {
                id: l.id.clone(),
                at: graph.vertex_index(&l.at)?,
            });
        }
        Ok(OpenGraph { graph, leads })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    pub fn lead_count(&self) -> usize {
        self.leads.len()
    }

    pub fn lead_index(&self, id: &str) -> Option<usize> {
        self.leads.iter().position(|l| l.id == id)
    }

    pub fn scaled(&self, factor: f64) -> OpenGraph {
        OpenGraph {
            graph: self.graph.scaled(factor),
            leads: self.leads.clone(),
        }
    }

    /// Same graph with leads reordered: new lead `i` is old lead `order[i]`.
    pub fn with_lead_order(&self, order: &[usize]) -> OpenGraph {
        assert_eq!(order.len(), self.leads.len());
        OpenGraph {
            graph: self.graph.clone(),
            leads: order.iter().map(|&i| self.leads[i].clone()).collect(),
        }
    }

    pub fn description(&self) -> GraphDescription {
        let mut desc = self.graph.description();
        desc.leads = self
            .leads
            .iter()
            .map(|l| LeadSpec {
                id: l.id.clone(),
                at: self.graph.vertices[l.at].id.clone(),
            })
            .collect();
        desc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Leaves the edge's `from` vertex.
    Forward,
    /// Leaves the edge's `to` vertex.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Lead(usize),
    Bond { edge: usize, dir: Direction },
}

/// Channel indexing for the directed-bond method.
///
/// Channels are the leads (in lead order) followed by the directed bonds
/// sorted by (edge position, direction). A directed bond carries the
/// amplitudes at its origin vertex, so every channel belongs to exactly one
/// vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BondTable {
    channels: Vec<Channel>,
    lead_count: usize,
    origin: Vec<usize>,
    vertex_channels: Vec<Vec<usize>>,
    lengths: Vec<f64>,
    reverse: Vec<usize>,
}

pub fn bond_table(og: &OpenGraph) -> BondTable {
    BondTable::build(&og.graph, &og.leads)
}

impl BondTable {
    /// Table of a compact graph (bonds only).
    pub fn compact(g: &MetricGraph) -> BondTable {
        BondTable::build(g, &[])
    }

    fn build(g: &MetricGraph, leads: &[Lead]) -> BondTable {
        let mut channels: Vec<Channel> = (0..leads.len()).map(Channel::Lead).collect();
        let mut origin: Vec<usize> = leads.iter().map(|l| l.at).collect();
        let mut lengths = Vec::with_capacity(2 * g.edges.len());
        let mut reverse = Vec::with_capacity(2 * g.edges.len());
        for (i, e) in g.edges.iter().enumerate() {
            let fwd = channels.len();
            channels.push(Channel::Bond {
                edge: i,
                dir: Direction::Forward,
            });
            channels.push(Channel::Bond {
                edge: i,
                dir: Direction::Reverse,
            });
            origin.push(e.from);
            origin.push(e.to);
            lengths.extend([e.length, e.length]);
            reverse.extend([fwd + 1, fwd]);
        }
        let mut vertex_channels = vec![Vec::new(); g.vertices.len()];
        for (c, &v) in origin.iter().enumerate() {
            vertex_channels[v].push(c);
        }
        BondTable {
            channels,
            lead_count: leads.len(),
            origin,
            vertex_channels,
            lengths,
            reverse,
        }
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn lead_count(&self) -> usize {
        self.lead_count
    }

    pub fn bond_count(&self) -> usize {
        self.channels.len() - self.lead_count
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, c: usize) -> Channel {
        self.channels[c]
    }

    /// Vertex owning channel `c`.
    pub fn origin(&self, c: usize) -> usize {
        self.origin[c]
    }

    /// Channels at vertex `v`, in local (σ row/column) order.
    pub fn vertex_channels(&self, v: usize) -> &[usize] {
        &self.vertex_channels[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_channels[v].len()
    }

    /// Reversed bond of internal channel `c`, `None` for leads.
    pub fn reverse(&self, c: usize) -> Option<usize> {
        c.checked_sub(self.lead_count).map(|b| self.reverse[b])
    }

    /// Length of internal channel `c`, `None` for leads.
    pub fn length(&self, c: usize) -> Option<f64> {
        c.checked_sub(self.lead_count).map(|b| self.lengths[b])
    }

    /// Lengths of internal channels, indexed from zero at the first bond.
    pub fn bond_lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Reversal on internal channels, indexed from zero at the first bond.
    pub fn bond_reversal(&self) -> &[usize] {
        &self.reverse
    }

    /// Bond-relative index of reversal, i.e. `reverse(lead_count + b) - lead_count`.
    pub fn bond_partner(&self, b: usize) -> usize {
        self.reverse[b] - self.lead_count
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }
}

/// Lead count per vertex.
pub fn leads_per_vertex(og: &OpenGraph) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for l in &og.leads {
        *m.entry(l.at).or_insert(0) += 1;
    }
    m
}
