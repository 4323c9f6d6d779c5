//! Random graph generators and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use qgs::graph::{GraphDescription, OpenGraph, VertexCondition};
use qgs::io::symmetry_file::parse_symmetry_file;
use qgs::linalg::{self, c, CMatrix};
use qgs::symmetry::{EdgeImage, FiniteGroup, GraphAction, MatrixRep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn load_example(name: &str) -> OpenGraph {
    qgs::io::parse_graph_file(&example_path(name)).expect("shipped graph parses")
}

pub fn random_complex(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    random_complex(r, d).qr().q()
}

pub fn random_hermitian(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let m = random_complex(r, d);
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// Which vertex conditions a generator may pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditions {
    NeumannOnly,
    /// Neumann and Dirichlet: `D(k)` stays holomorphic.
    Standard,
    /// Every supported kind, including `k`-dependent `A,B` conditions.
    Mixed,
}

pub fn random_condition(r: &mut ChaCha8Rng, degree: usize, kinds: Conditions) -> VertexCondition {
    let pick = match kinds {
        Conditions::NeumannOnly => 0,
        Conditions::Standard => r.gen_range(0..2),
        Conditions::Mixed => r.gen_range(0..5),
    };
    match pick {
        0 => VertexCondition::neumann(),
        1 => VertexCondition::dirichlet(),
        2 => VertexCondition::Dft { degree },
        3 => VertexCondition::FixedUnitary {
            sigma: random_unitary(r, degree),
        },
        _ => VertexCondition::LinearAb {
            a: random_hermitian(r, degree),
            b: linalg::identity(degree),
        },
    }
}

/// Connected open graph: a random spanning tree plus extra edges (loops and
/// parallel edges allowed), leads at random vertices.
pub fn random_open_graph(r: &mut ChaCha8Rng, max_edges: usize, max_leads: usize, kinds: Conditions) -> OpenGraph {
    let nv = r.gen_range(1..=max_edges.min(5) + 1).min(5);
    let mut ends: Vec<(usize, usize)> = (1..nv).map(|v| (r.gen_range(0..v), v)).collect();
    let extra = r.gen_range(0..=max_edges - ends.len().min(max_edges));
    for _ in 0..extra {
        ends.push((r.gen_range(0..nv), r.gen_range(0..nv)));
    }
    let leads: Vec<usize> = (0..r.gen_range(1..=max_leads)).map(|_| r.gen_range(0..nv)).collect();
    let lengths: Vec<f64> = ends.iter().map(|_| r.gen_range(0.3..2.0)).collect();
    assemble(r, nv, &ends, &lengths, &leads, |r, _, d| random_condition(r, d, kinds))
}

/// Like [`random_open_graph`] with Neumann and Dirichlet vertices, but every
/// vertex carrying a lead is Neumann and there is at least one edge, so the
/// leads actually couple to the interior.
pub fn random_resonator(r: &mut ChaCha8Rng, max_edges: usize, max_leads: usize) -> OpenGraph {
    let nv = r.gen_range(2..=max_edges.min(4) + 1);
    let mut ends: Vec<(usize, usize)> = (1..nv).map(|v| (r.gen_range(0..v), v)).collect();
    for _ in 0..r.gen_range(0..=max_edges - ends.len()) {
        ends.push((r.gen_range(0..nv), r.gen_range(0..nv)));
    }
    let leads: Vec<usize> = (0..r.gen_range(1..=max_leads)).map(|_| r.gen_range(0..nv)).collect();
    let lengths: Vec<f64> = ends.iter().map(|_| r.gen_range(0.3..2.0)).collect();
    let lead_set = leads.clone();
    assemble(r, nv, &ends, &lengths, &leads, move |r, v, d| {
        if lead_set.contains(&v) {
            VertexCondition::neumann()
        } else {
            random_condition(r, d, Conditions::Standard)
        }
    })
}

/// Connected compact graph without parallel edges or loops, Neumann vertices and lengths in `[0.5, 1.5]`.
pub fn random_neumann_graph(r: &mut ChaCha8Rng, max_edges: usize) -> qgs::graph::MetricGraph {
    let nv = r.gen_range(2..=max_edges.min(5) + 1).min(5);
    let mut ends: Vec<(usize, usize)> = (1..nv).map(|v| (r.gen_range(0..v), v)).collect();
    for _ in 0..r.gen_range(0..=max_edges - ends.len()) {
        let a = r.gen_range(0..nv);
        let b = (a + r.gen_range(1..nv)) % nv;
        if !ends.iter().any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b)) {
            ends.push((a, b));
        }
    }
    let lengths: Vec<f64> = ends.iter().map(|_| r.gen_range(0.5..1.5)).collect();
    let og = assemble(r, nv, &ends, &lengths, &[], |_, _, _| VertexCondition::neumann());
    og.graph().clone()
}

fn assemble<F>(
    r: &mut ChaCha8Rng,
    nv: usize,
    ends: &[(usize, usize)],
    lengths: &[f64],
    leads: &[usize],
    mut condition: F,
) -> OpenGraph
where
    F: FnMut(&mut ChaCha8Rng, usize, usize) -> VertexCondition,
{
    let mut degree = vec![0; nv];
    for &(a, b) in ends {
        degree[a] += 1;
        degree[b] += 1;
    }
    for &l in leads {
        degree[l] += 1;
    }
    let mut d = GraphDescription::default();
    for (v, &deg) in degree.iter().enumerate() {
        let cond = condition(r, v, deg);
        d = d.vertex(&format!("v{v}"), cond);
    }
    for (i, (&(a, b), &len)) in ends.iter().zip(lengths).enumerate() {
        d = d.edge(&format!("e{i}"), &format!("v{a}"), &format!("v{b}"), len);
    }
    for (i, &l) in leads.iter().enumerate() {
        d = d.lead(&format!("l{i}"), &format!("v{l}"));
    }
    if leads.is_empty() {
        let g = qgs::graph::build_graph(&d).expect("valid compact graph");
        let first = g.vertices()[0].id.clone();
        // Callers that want the compact graph read it back through `graph()`.
        return qgs::graph::attach_leads_with(&g, &[&first], &[(&first, VertexCondition::neumann())])
            .expect("one auxiliary lead");
    }
    OpenGraph::from_description(&d).expect("generator builds valid graphs")
}

/// An open graph made of one copy of a random piece per group element, joined
/// by Cayley edges; the group acts by left multiplication on the copies.
pub struct SymmetricGraph {
    pub graph: OpenGraph,
    pub action: GraphAction,
}

pub fn random_symmetric_graph(r: &mut ChaCha8Rng, group: &FiniteGroup, kinds: Conditions) -> SymmetricGraph {
    let n = group.order();
    let pv = r.gen_range(1..=3usize);
    // Vertex 0 of the piece is the hub carrying Cayley edges.
    let mut piece_edges: Vec<(usize, usize, f64)> = (1..pv).map(|v| (r.gen_range(0..v), v, r.gen_range(0.4..1.6))).collect();
    for _ in 0..r.gen_range(0..=2) {
        piece_edges.push((r.gen_range(0..pv), r.gen_range(0..pv), r.gen_range(0.4..1.6)));
    }
    let piece_leads: Vec<usize> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(0..pv)).collect();
    let gens = group.generators().to_vec();
    let cayley_len: Vec<f64> = gens.iter().map(|_| r.gen_range(0.4..1.6)).collect();

    let mut degree = vec![0; pv];
    for &(a, b, _) in &piece_edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    for &l in &piece_leads {
        degree[l] += 1;
    }
    let conds: Vec<VertexCondition> = (0..pv)
        .map(|v| {
            if v == 0 {
                let k = if kinds == Conditions::NeumannOnly { Conditions::NeumannOnly } else { Conditions::Standard };
                random_condition(r, 0, k)
            } else {
                random_condition(r, degree[v], kinds)
            }
        })
        .collect();

    let vid = |h: usize, v: usize| format!("c{h}v{v}");
    let mut d = GraphDescription::default();
    for h in 0..n {
        for (v, cond) in conds.iter().enumerate() {
            d = d.vertex(&vid(h, v), cond.clone());
        }
    }
    for h in 0..n {
        for (i, &(a, b, len)) in piece_edges.iter().enumerate() {
            d = d.edge(&format!("c{h}e{i}"), &vid(h, a), &vid(h, b), len);
        }
    }
    for h in 0..n {
        for (i, &s) in gens.iter().enumerate() {
            d = d.edge(&format!("c{h}g{i}"), &vid(h, 0), &vid(group.mul(h, s), 0), cayley_len[i]);
        }
    }
    for h in 0..n {
        for (j, &l) in piece_leads.iter().enumerate() {
            d = d.lead(&format!("c{h}l{j}"), &vid(h, l));
        }
    }
    let graph = OpenGraph::from_description(&d).expect("symmetric graph is valid");

    let pl = piece_leads.len();
    let pe = piece_edges.len();
    let ng = gens.len();
    let lead_perms = (0..n)
        .map(|g| (0..n * pl).map(|i| group.mul(g, i / pl) * pl + i % pl).collect())
        .collect();
    let edge_perms = (0..n)
        .map(|g| {
            let piece = (0..n * pe).map(|i| EdgeImage {
                edge: group.mul(g, i / pe) * pe + i % pe,
                reversed: false,
            });
            let cay = (0..n * ng).map(|i| EdgeImage {
                edge: n * pe + group.mul(g, i / ng) * ng + i % ng,
                reversed: false,
            });
            piece.chain(cay).collect()
        })
        .collect();
    SymmetricGraph {
        graph,
        action: GraphAction::new(group.clone(), lead_perms, Some(edge_perms)),
    }
}

/// Groups exercised by the symmetry properties.
pub fn test_groups() -> Vec<FiniteGroup> {
    vec![
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::cyclic(4),
        FiniteGroup::symmetric3(),
        FiniteGroup::dihedral4(),
    ]
}

/// All irreducible representations of a group from [`test_groups`].
pub fn irreps(group: &FiniteGroup) -> Vec<MatrixRep> {
    let n = group.order();
    let one_dim = |name: &str, values: Vec<C64>| {
        MatrixRep::new(name, group.clone(), values.into_iter().map(|z| CMatrix::from_element(1, 1, z)).collect())
            .expect("character is a homomorphism")
    };
    let names: Vec<&str> = group.names().iter().map(String::as_str).collect();
    if names == ["e", "(1,2)", "(1,3)", "(2,3)", "(1,2,3)", "(1,3,2)"] {
        let sym = parse_symmetry_file(&example_path("s3_sym.json")).expect("shipped symmetry file");
        let sign = [1.0, -1.0, -1.0, -1.0, 1.0, 1.0].iter().map(|&x| c(x, 0.0)).collect();
        return vec![
            MatrixRep::trivial(group),
            one_dim("sign", sign),
            sym.representation("R_2d").expect("R_2d").rep,
        ];
    }
    if names == ["e", "s", "s2", "s3", "rx", "ry", "ru", "rv"] {
        let ch = |v: [f64; 8]| v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>();
        let corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let perms = [
            [0, 1, 2, 3],
            [1, 2, 3, 0],
            [2, 3, 0, 1],
            [3, 0, 1, 2],
            [3, 2, 1, 0],
            [1, 0, 3, 2],
            [0, 3, 2, 1],
            [2, 1, 0, 3],
        ];
        let col = |i: usize| corners[i];
        let basis = linalg::from_real_rows(&[&[col(0)[0], col(1)[0]], &[col(0)[1], col(1)[1]]]);
        let inv = basis.clone().try_inverse().expect("corners span the plane");
        let mats = perms
            .iter()
            .map(|p| {
                let (a, b) = (col(p[0]), col(p[1]));
                linalg::from_real_rows(&[&[a[0], b[0]], &[a[1], b[1]]]) * &inv
            })
            .collect();
        return vec![
            MatrixRep::trivial(group),
            one_dim("rot", ch([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])),
            one_dim("axes", ch([1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0])),
            one_dim("diag", ch([1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0])),
            MatrixRep::new("E", group.clone(), mats).expect("planar rep"),
        ];
    }
    // Cyclic: characters j ↦ ω^{ja}.
    (0..n)
        .map(|j| {
            let w = (0..n)
                .map(|a| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * a) as f64 / n as f64))
                .collect();
            one_dim(&format!("chi{j}"), w)
        })
        .collect()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sorts complex numbers by real, then imaginary part.
pub fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Largest distance in an optimal-ish greedy matching of equal-size multisets.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal sizes");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
