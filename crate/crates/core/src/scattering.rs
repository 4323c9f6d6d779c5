//! Global scattering matrix, secular function and compact spectra.
//!
//! Amplitudes live on channels (see [`BondTable`]). On a directed bond the
//! wave is `a_in e^{-ikx} + a_out e^{ikx}` with `x` measured from the bond's
//! origin vertex, so the incoming amplitude of a bond equals the outgoing
//! amplitude of its reverse times `e^{ikL}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bond_table, BondTable, MetricGraph, OpenGraph};
use crate::linalg::{self, c, C64, CMatrix, I, ONE};
use crate::resonances::contour::{winding_number, ContourError, Rect};
use crate::vertex::{VertexError, VertexSigma};

/// `|D(k)|` below which a real `k` is reported as an interior singularity.
pub const SINGULAR_INTERIOR_TOL: f64 = 1e-13;
/// Default cap on scan nodes for [`eigenvalues_compact`].
pub const DEFAULT_NODE_BUDGET: usize = 4_000_000;

pub(crate) const ACCEPT_SIGMA_MIN: f64 = 1e-7;
pub(crate) const MULTIPLICITY_TOL: f64 = 1e-6;
const DEDUP_RADIUS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error("k must be non-zero")]
    ZeroK,
    #[error("I - Σ_EE P(k) is singular at k = {k} (|D| = {det:.3e}); k is an interior bound state or exceptional point")]
    SingularInterior { k: C64, det: f64 },
    #[error("vertex `{vertex}`: {source}")]
    Vertex { vertex: String, source: VertexError },
    #[error("scan would need {nodes} nodes, budget is {budget}")]
    WindowTooWide { nodes: usize, budget: usize },
    #[error("invalid window [{kmin}, {kmax}]: need 0 < kmin < kmax")]
    InvalidWindow { kmin: f64, kmax: f64 },
}

/// One evaluation of the scattering problem at `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringEvaluation {
    pub k: C64,
    pub s: CMatrix,
    /// `D(k) = det(I − Σ_EE P(k))`.
    pub interior_det: C64,
    /// Smallest singular value of `I − Σ_EE P(k)`; zero-sized interiors report 1.
    pub interior_min_singular: f64,
    pub interior_size: usize,
}

/// Vertex scattering data of a graph, assembled once and evaluated at many `k`.
#[derive(Debug, Clone)]
pub struct ScatteringSystem {
    table: BondTable,
    sigmas: Vec<VertexSigma>,
    ids: Vec<String>,
    total_length: f64,
}

impl ScatteringSystem {
    pub fn new(og: &OpenGraph) -> Result<Self, ScatteringError> {
        Self::assemble(og.graph(), bond_table(og))
    }

    pub fn compact(g: &MetricGraph) -> Result<Self, ScatteringError> {
        Self::assemble(g, BondTable::compact(g))
    }

    fn assemble(g: &MetricGraph, table: BondTable) -> Result<Self, ScatteringError> {
        let sigmas = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                VertexSigma::from_condition(&v.condition, table.degree(i)).map_err(|source| ScatteringError::Vertex {
                    vertex: v.id.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ScatteringSystem {
            table,
            sigmas,
            ids: g.vertices().iter().map(|v| v.id.clone()).collect(),
            total_length: g.total_length(),
        })
    }

    pub fn table(&self) -> &BondTable {
        &self.table
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// True when every vertex σ is k-independent, making `D(k)` entire.
    pub fn is_holomorphic(&self) -> bool {
        self.sigmas.iter().all(VertexSigma::is_constant)
    }

    /// Channel scattering matrix Σ(k), block diagonal over vertices.
    pub fn channel_sigma(&self, k: C64) -> Result<CMatrix, ScatteringError> {
        let n = self.table.channel_count();
        let mut out = CMatrix::zeros(n, n);
        for (v, sigma) in self.sigmas.iter().enumerate() {
            let ch = self.table.vertex_channels(v);
            if ch.is_empty() {
                continue;
            }
            let local = sigma.at(k).map_err(|source| ScatteringError::Vertex {
                vertex: self.ids[v].clone(),
                source,
            })?;
            for (i, &ci) in ch.iter().enumerate() {
                for (j, &cj) in ch.iter().enumerate() {
                    out[(ci, cj)] = local[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Blocks `(Σ_LL, Σ_LE, Σ_EL, Σ_EE P)` at `k`.
    fn blocks(&self, k: C64) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix), ScatteringError> {
        let sigma = self.channel_sigma(k)?;
        let nl = self.table.lead_count();
        let nb = self.table.bond_count();
        let phases: Vec<C64> = self.table.bond_lengths().iter().map(|&l| (I * k * l).exp()).collect();
        // (Σ_EE P)[i, j] = Σ_EE[i, rev j] e^{ikL_j}
        let see_p = CMatrix::from_fn(nb, nb, |i, j| sigma[(nl + i, nl + self.table.bond_partner(j))] * phases[j]);
        let sle_p = CMatrix::from_fn(nl, nb, |i, j| sigma[(i, nl + self.table.bond_partner(j))] * phases[j]);
        let sll = sigma.view((0, 0), (nl, nl)).into_owned();
        let sel = sigma.view((nl, 0), (nb, nl)).into_owned();
        Ok((sll, sle_p, sel, see_p))
    }

    /// Bond matrix `U(k) = Σ_EE P(k)`; for compact graphs this is the full quantum map.
    pub fn bond_matrix(&self, k: C64) -> Result<CMatrix, ScatteringError> {
        Ok(self.blocks(k)?.3)
    }

    /// `D(k) = det(I − Σ_EE P(k))`, defined at every `k` including zero.
    pub fn interior_det_raw(&self, k: C64) -> Result<C64, ScatteringError> {
        let u = self.bond_matrix(k)?;
        Ok(linalg::det(&(linalg::identity(u.nrows()) - u)))
    }

    pub fn interior_determinant(&self, k: C64) -> Result<C64, ScatteringError> {
        if k == linalg::ZERO {
            return Err(ScatteringError::ZeroK);
        }
        self.interior_det_raw(k)
    }

    /// The lead scattering matrix alone, without rank diagnostics.
    pub fn s_matrix(&self, k: C64) -> Result<CMatrix, ScatteringError> {
        Ok(self.solve(k)?.0)
    }

    fn solve(&self, k: C64) -> Result<(CMatrix, C64, CMatrix), ScatteringError> {
        if k == linalg::ZERO {
            return Err(ScatteringError::ZeroK);
        }
        let (sll, sle_p, sel, see_p) = self.blocks(k)?;
        let nb = see_p.nrows();
        let m = linalg::identity(nb) - see_p;
        if nb == 0 {
            return Ok((sll, ONE, m));
        }
        let lu = m.clone().lu();
        let det = lu.determinant();
        if k.im == 0.0 && det.norm() < SINGULAR_INTERIOR_TOL {
            return Err(ScatteringError::SingularInterior { k, det: det.norm() });
        }
        let x = lu.solve(&sel).ok_or(ScatteringError::SingularInterior { k, det: det.norm() })?;
        Ok((sll + sle_p * x, det, m))
    }

    pub fn evaluate(&self, k: C64) -> Result<ScatteringEvaluation, ScatteringError> {
        let (s, det, m) = self.solve(k)?;
        let interior_min_singular = if m.nrows() == 0 { 1.0 } else { linalg::min_singular_value(&m) };
        Ok(ScatteringEvaluation {
            k,
            s,
            interior_det: det,
            interior_min_singular,
            interior_size: m.nrows(),
        })
    }

    /// `det(I − S(k))`.
    pub fn secular_value(&self, k: C64) -> Result<C64, ScatteringError> {
        let s = self.s_matrix(k)?;
        Ok(linalg::det(&(linalg::identity(s.nrows()) - s)))
    }
}

pub fn scattering_matrix(og: &OpenGraph, k: C64) -> Result<ScatteringEvaluation, ScatteringError> {
    ScatteringSystem::new(og)?.evaluate(k)
}

pub fn secular_value(og: &OpenGraph, k: C64) -> Result<C64, ScatteringError> {
    ScatteringSystem::new(og)?.secular_value(k)
}

pub fn interior_determinant(og: &OpenGraph, k: C64) -> Result<C64, ScatteringError> {
    ScatteringSystem::new(og)?.interior_determinant(k)
}

/// Window and resolution limits for a real-axis zero scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRequest {
    pub kmin: f64,
    pub kmax: f64,
    pub node_budget: usize,
    /// Overrides the default grid step when set.
    pub step: Option<f64>,
}

impl SpectrumRequest {
    pub fn new(kmin: f64, kmax: f64) -> Self {
        SpectrumRequest {
            kmin,
            kmax,
            node_budget: DEFAULT_NODE_BUDGET,
            step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub k: f64,
    pub multiplicity: usize,
    /// `|det(I − U(k))|` at the reported `k`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    pub kmin: f64,
    pub kmax: f64,
    pub step: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Whether the multiplicity total matched an independent contour count.
    /// `None` when no count was possible (k-dependent conditions, or a scan of `det(I − S)`).
    pub count_verified: Option<bool>,
}

impl SpectrumWindow {
    /// Eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.k).take(e.multiplicity))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }
}

fn default_step(total_length: f64) -> f64 {
    (std::f64::consts::PI / (4.0 * total_length.max(f64::MIN_POSITIVE))).min(0.01)
}

/// Eigenvalues of a compact graph in `[kmin, kmax]`, as zeros of `det(I − U(k))`.
pub fn eigenvalues_compact(g: &MetricGraph, req: &SpectrumRequest) -> Result<SpectrumWindow, ScatteringError> {
    let sys = ScatteringSystem::compact(g)?;
    check_window(req)?;
    let mut step = req.step.unwrap_or_else(|| default_step(sys.total_length()));
    let unitary = |k: f64| sys.bond_matrix(c(k, 0.0));
    let mut found = scan_unitary_zeros(&unitary, req.kmin, req.kmax, step, req.node_budget)?;
    if !sys.is_holomorphic() || sys.table().bond_count() == 0 {
        return Ok(SpectrumWindow {
            kmin: req.kmin,
            kmax: req.kmax,
            step,
            eigenvalues: found,
            count_verified: None,
        });
    }
    let expected = contour_count(&sys, req.kmin, req.kmax);
    let mut verified = expected.map(|n| n == total(&found));
    for _ in 0..2 {
        if verified != Some(false) {
            break;
        }
        step /= 4.0;
        found = scan_unitary_zeros(&unitary, req.kmin, req.kmax, step, req.node_budget)?;
        verified = expected.map(|n| n == total(&found));
    }
    Ok(SpectrumWindow {
        kmin: req.kmin,
        kmax: req.kmax,
        step,
        eigenvalues: found,
        count_verified: verified,
    })
}

/// Real zeros of `det(I − S(k))` of an open graph in `[kmin, kmax]`.
///
/// Real `k` where the interior is singular are stepped around.
pub fn secular_zeros(og: &OpenGraph, req: &SpectrumRequest) -> Result<SpectrumWindow, ScatteringError> {
    let sys = ScatteringSystem::new(og)?;
    check_window(req)?;
    let step = req.step.unwrap_or_else(|| default_step(sys.total_length()) / 4.0);
    let unitary = |k: f64| match sys.s_matrix(c(k, 0.0)) {
        Err(ScatteringError::SingularInterior { .. }) => sys.s_matrix(c(k + 1e-9 * k.max(1.0), 0.0)),
        other => other,
    };
    let found = scan_unitary_zeros(&unitary, req.kmin, req.kmax, step, req.node_budget)?;
    Ok(SpectrumWindow {
        kmin: req.kmin,
        kmax: req.kmax,
        step,
        eigenvalues: found,
        count_verified: None,
    })
}

fn check_window(req: &SpectrumRequest) -> Result<(), ScatteringError> {
    if !(req.kmin > 0.0 && req.kmax > req.kmin && req.kmax.is_finite()) {
        return Err(ScatteringError::InvalidWindow {
            kmin: req.kmin,
            kmax: req.kmax,
        });
    }
    Ok(())
}

fn total(found: &[Eigenvalue]) -> usize {
    found.iter().map(|e| e.multiplicity).sum()
}

/// Zeros of `det(I − U)` in the window, counted on a thin rectangle around the real axis.
///
/// Compact-graph zeros are real, so the rectangle captures exactly the window's spectrum.
fn contour_count(sys: &ScatteringSystem, kmin: f64, kmax: f64) -> Option<usize> {
    let eta = (0.5 / sys.total_length()).min(0.1);
    let f = |k: C64| sys.interior_det_raw(k).unwrap_or(c(f64::NAN, f64::NAN));
    let samples = (((kmax - kmin) * sys.total_length()) as usize * 4).clamp(8, 200_000);
    match winding_number(f, &Rect::new(kmin, kmax, -eta, eta), samples) {
        Ok(n) if n >= 0 => Some(n as usize),
        Ok(_) | Err(ContourError::BoundaryZero(_)) | Err(_) => None,
    }
}

/// Real zeros of `det(I − U(k))` for a unitary-valued `U` on `[kmin, kmax]`.
///
/// `det(I − U) = (−2i)^n e^{iφ/2} Π sin(θ_j/2)` with `φ = arg det U`, so after
/// removing the continuous phase the determinant is real and changes sign at
/// odd-multiplicity zeros. Even-multiplicity zeros show up as local minima of
/// its modulus. Every candidate is polished by minimising the smallest
/// singular value of `I − U`.
pub fn scan_unitary_zeros<F>(
    unitary: &F,
    kmin: f64,
    kmax: f64,
    step: f64,
    budget: usize,
) -> Result<Vec<Eigenvalue>, ScatteringError>
where
    F: Fn(f64) -> Result<CMatrix, ScatteringError> + Sync,
{
    let lo = (kmin - step).max(0.5 * kmin);
    let hi = kmax + step;
    let nodes = ((hi - lo) / step).ceil() as usize + 1;
    if nodes > budget {
        return Err(ScatteringError::WindowTooWide { nodes, budget });
    }
    let grid: Vec<f64> = (0..nodes).map(|i| (lo + i as f64 * step).min(hi)).collect();
    let samples = grid
        .par_iter()
        .map(|&k| {
            let u = unitary(k)?;
            let n = u.nrows();
            let d1 = linalg::det(&(linalg::identity(n) - &u));
            let du = linalg::det(&u);
            Ok((d1, du, n))
        })
        .collect::<Result<Vec<_>, ScatteringError>>()?;
    if samples.is_empty() || samples[0].2 == 0 {
        return Ok(Vec::new());
    }
    let n = samples[0].2;
    // (−i)^n
    let norm = I.powu(n as u32).conj();
    let mut phase = samples[0].1.arg();
    let mut zeta = Vec::with_capacity(nodes);
    for (i, &(d1, du, _)) in samples.iter().enumerate() {
        if i > 0 {
            phase += (du / samples[i - 1].1).arg();
        }
        zeta.push((d1 * (-0.5 * phase * I).exp() / norm).re);
    }
    let mut brackets = Vec::new();
    for i in 0..nodes - 1 {
        if zeta[i] == 0.0 || zeta[i] * zeta[i + 1] < 0.0 {
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    for i in 1..nodes - 1 {
        let m = zeta[i].abs();
        if m <= zeta[i - 1].abs() && m <= zeta[i + 1].abs() {
            brackets.push((grid[i - 1], grid[i + 1]));
        }
    }
    let sigma_min = |k: f64| -> f64 {
        match unitary(k) {
            Ok(u) => linalg::min_singular_value(&(linalg::identity(u.nrows()) - u)),
            Err(_) => f64::INFINITY,
        }
    };
    let mut hits: Vec<Eigenvalue> = brackets
        .par_iter()
        .filter_map(|&(a, b)| {
            let k = golden_min(&sigma_min, a, b, 1e-13 * b.max(1.0));
            if sigma_min(k) > ACCEPT_SIGMA_MIN {
                return None;
            }
            let u = unitary(k).ok()?;
            let m = linalg::identity(u.nrows()) - u;
            let multiplicity = linalg::singular_values(&m).iter().filter(|&&s| s <= MULTIPLICITY_TOL).count();
            Some(Eigenvalue {
                k,
                multiplicity: multiplicity.max(1),
                residual: linalg::det(&m).norm(),
            })
        })
        .collect();
    hits.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut out: Vec<Eigenvalue> = Vec::with_capacity(hits.len());
    for h in hits {
        match out.last_mut() {
            Some(prev) if (h.k - prev.k).abs() <= DEDUP_RADIUS => {
                if h.residual < prev.residual {
                    *prev = h;
                }
            }
            _ => out.push(h),
        }
    }
    out.retain(|e| e.k >= kmin && e.k <= kmax);
    Ok(out)
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}
