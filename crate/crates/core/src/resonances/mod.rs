//! Resonance poles: zeros of the interior determinant `D(k)` in a rectangle.
//!
//! Poles are located with the argument principle on a recursively subdivided
//! rectangle and polished by Newton's method on `D`.

pub mod contour;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OpenGraph;
use std::f64::consts::PI;

use crate::linalg::{self, c, C64, I};
use crate::scattering::{golden_min, ScatteringError, ScatteringSystem, ACCEPT_SIGMA_MIN, MULTIPLICITY_TOL};

pub use contour::{winding_number, winding_number_spaced, ContourError, Rect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResonanceError {
    #[error("contour passes through a zero of D near {0} after all retries")]
    BoundaryZero(C64),
    #[error("vertex conditions depend on k; D(k) is not holomorphic")]
    NonHolomorphic,
    #[error("Newton iteration left the search bracket (at {0})")]
    Diverged(C64),
    #[error("invalid search window")]
    InvalidWindow,
    #[error("subdivision exceeded {0} cells")]
    TooManyCells(usize),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

/// Search parameters for [`find_poles`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleOptions {
    /// Initial boundary samples per rectangle side.
    pub samples_per_side: usize,
    /// Cells at or below this size are no longer subdivided.
    pub min_cell: f64,
    pub dedup_radius: f64,
    /// Acceptance bound on the normalised residual of `D`.
    pub residual_tol: f64,
    /// `|Im k|` at or below this is treated as real.
    pub real_axis_tol: f64,
    pub max_cells: usize,
}

impl Default for PoleOptions {
    fn default() -> Self {
        PoleOptions {
            samples_per_side: 16,
            min_cell: 1e-6,
            dedup_radius: 1e-7,
            residual_tol: 1e-8,
            real_axis_tol: 1e-8,
            max_cells: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub k: C64,
    pub multiplicity: usize,
    /// `|D(k)|` divided by the product of the column norms of `I − Σ_EE P(k)`.
    pub residual: f64,
    pub iterations: usize,
    /// Zero of `D` with positive imaginary part.
    pub upper_half_plane: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    /// Resonances, sorted by `(Re k, Im k)`.
    pub poles: Vec<Pole>,
    /// Real zeros of `D`: bound states decoupled from the leads.
    pub bound_states: Vec<Pole>,
    pub window: Rect,
    pub options: PoleOptions,
    pub warnings: Vec<String>,
}

impl PoleSet {
    pub fn total_multiplicity(&self) -> usize {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }

    pub fn has_upper_half_plane(&self) -> bool {
        self.poles.iter().any(|p| p.upper_half_plane)
    }
}

/// Result of a Newton polish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub k: C64,
    pub residual: f64,
    pub iterations: usize,
}

struct Determinant {
    sys: ScatteringSystem,
    h: f64,
    /// Longest initial contour step, from the largest frequency of `D`.
    max_step: f64,
    /// Real zeros of `D` (with orders) divided out of [`Determinant::value`].
    removed: Vec<(f64, i32)>,
}

impl Determinant {
    fn new(og: &OpenGraph) -> Result<Self, ResonanceError> {
        let sys = ScatteringSystem::new(og)?;
        let h = 1e-3 / sys.table().max_length().max(1.0);
        let frequency: f64 = sys.table().bond_lengths().iter().sum();
        let max_step = PI / (4.0 * frequency.max(f64::MIN_POSITIVE));
        Ok(Determinant {
            sys,
            h,
            max_step,
            removed: Vec::new(),
        })
    }

    fn raw(&self, k: C64) -> C64 {
        self.sys.interior_det_raw(k).unwrap_or(c(f64::NAN, f64::NAN))
    }

    fn value(&self, k: C64) -> C64 {
        if self.removed.is_empty() {
            return self.raw(k);
        }
        // D / Π (k − x)^m is smooth and non-zero at each x; sample just beside it.
        let k = if self.removed.iter().any(|&(x, _)| (k - x).norm() < 1e-8) {
            k + c(1e-8, -1e-8)
        } else {
            k
        };
        let denom: C64 = self.removed.iter().map(|&(x, m)| (k - x).powi(m)).product();
        self.raw(k) / denom
    }

    fn sigma_min(&self, x: f64) -> f64 {
        match self.sys.bond_matrix(c(x, 0.0)) {
            Ok(u) => linalg::min_singular_value(&(linalg::identity(u.nrows()) - u)),
            Err(_) => f64::INFINITY,
        }
    }

    /// Real zeros of `D` on `[a, b]` farther than `origin_radius` from the
    /// origin, with orders from the nullity of `I − U`.
    fn real_zeros(&self, a: f64, b: f64, origin_radius: f64) -> Vec<(f64, usize, f64)> {
        let step = 0.5 * self.max_step;
        let n = ((b - a) / step).ceil().max(2.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let values: Vec<f64> = grid.par_iter().map(|&x| self.sigma_min(x)).collect();
        let mut hits: Vec<(f64, usize, f64)> = (1..n)
            .into_par_iter()
            .filter(|&i| values[i] <= values[i - 1] && values[i] <= values[i + 1])
            .filter_map(|i| {
                let f = |x: f64| self.sigma_min(x);
                let x = golden_min(&f, grid[i - 1], grid[i + 1], 1e-13 * grid[i + 1].abs().max(1.0));
                if f(x) > ACCEPT_SIGMA_MIN || x.abs() <= origin_radius {
                    return None;
                }
                let u = self.sys.bond_matrix(c(x, 0.0)).ok()?;
                let m = linalg::identity(u.nrows()) - u;
                let order = linalg::singular_values(&m).iter().filter(|&&s| s <= MULTIPLICITY_TOL).count();
                Some((x, order.max(1), self.normalized_residual(c(x, 0.0))))
            })
            .collect();
        hits.sort_by(|p, q| p.0.total_cmp(&q.0));
        hits.dedup_by(|p, q| (p.0 - q.0).abs() <= 1e-7);
        hits
    }

    /// Divides out the zero at the origin and the real zeros near `search`,
    /// returning the real zeros found.
    fn remove_real_zeros(&mut self, search: &Rect, samples: usize) -> Vec<(f64, usize, f64)> {
        let r = (0.05 / self.sys.table().max_length().max(1.0)).min(0.05);
        if search.inflate(r).contains(linalg::ZERO) {
            let around = Rect::new(-r, r, -r, r);
            if let Ok(m) = winding_number_spaced(|z| self.raw(z), &around, samples, self.max_step) {
                if m > 0 {
                    self.removed.push((0.0, m as i32));
                }
            }
        }
        if !(search.im_min < 0.0 && search.im_max > 0.0) {
            return Vec::new();
        }
        let margin = search.im_max;
        let zeros = self.real_zeros(search.re_min - margin, search.re_max + margin, r);
        self.removed.extend(zeros.iter().map(|&(x, m, _)| (x, m as i32)));
        zeros
    }

    /// Four-point complex-step derivative, exact for polynomials up to degree four.
    fn derivative(&self, k: C64) -> C64 {
        let mut acc = linalg::ZERO;
        let mut dir = linalg::ONE;
        for _ in 0..4 {
            acc += self.value(k + dir * self.h) / dir;
            dir *= I;
        }
        acc / (4.0 * self.h)
    }

    fn normalized_residual(&self, k: C64) -> f64 {
        let Ok(u) = self.sys.bond_matrix(k) else {
            return f64::INFINITY;
        };
        let m = linalg::identity(u.nrows()) - u;
        let scale: f64 = m.column_iter().map(|col| col.norm().max(1e-300)).product();
        linalg::det(&m).norm() / scale.max(1e-300)
    }

    /// Newton on `D` with step `m·D/D'`; `keep` bounds the admissible iterates.
    fn newton<K: Fn(C64, C64) -> bool>(&self, k0: C64, m: usize, keep: K) -> Result<Refined, C64> {
        let mut k = k0;
        for it in 0..50 {
            let d = self.value(k);
            if d == linalg::ZERO {
                return Ok(Refined { k, residual: 0.0, iterations: it });
            }
            let dp = self.derivative(k);
            if !(dp.re.is_finite() && dp.im.is_finite()) || dp == linalg::ZERO {
                return Err(k);
            }
            let step = d / dp * m as f64;
            let next = k - step;
            if !keep(next, step) {
                return Err(next);
            }
            k = next;
            if step.norm() <= 1e-12 * k.norm().max(1.0) {
                return Ok(Refined {
                    k,
                    residual: self.normalized_residual(k),
                    iterations: it + 1,
                });
            }
        }
        Ok(Refined {
            k,
            residual: self.normalized_residual(k),
            iterations: 50,
        })
    }
}

/// Newton polish of a zero of `D` from `k0`.
///
/// The admissible region is a disc around `k0` of ten times the first Newton
/// step; leaving it is [`ResonanceError::Diverged`].
pub fn refine_pole(og: &OpenGraph, k0: C64) -> Result<Refined, ResonanceError> {
    let det = Determinant::new(og)?;
    let d0 = det.value(k0);
    if d0 == linalg::ZERO {
        return Ok(Refined {
            k: k0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let first = (d0 / det.derivative(k0)).norm();
    if !first.is_finite() {
        return Err(ResonanceError::Diverged(k0));
    }
    let radius = 10.0 * first.max(1e-12);
    det.newton(k0, 1, |z, _| (z - k0).norm() <= radius)
        .map_err(ResonanceError::Diverged)
}

enum CellOutcome {
    Found(C64, usize, Refined),
    Split(Vec<(Rect, i64)>),
    Unresolved(Rect, i64),
}

/// Zeros of `D(k)` inside `window`, with multiplicities from winding numbers.
pub fn find_poles(og: &OpenGraph, window: &Rect, opts: &PoleOptions) -> Result<PoleSet, ResonanceError> {
    if !window.is_valid() {
        return Err(ResonanceError::InvalidWindow);
    }
    let mut det = Determinant::new(og)?;
    if !det.sys.is_holomorphic() {
        return Err(ResonanceError::NonHolomorphic);
    }
    let mut set = PoleSet {
        poles: Vec::new(),
        bound_states: Vec::new(),
        window: *window,
        options: *opts,
        warnings: Vec::new(),
    };
    if det.sys.table().bond_count() == 0 {
        return Ok(set);
    }
    let samples = opts.samples_per_side.max(1);

    // D has no zeros with Im k > 0, so a top edge on the real axis (where
    // bound states sit) is moved up into that zero-free strip.
    let lift = (0.5 / det.sys.total_length().max(f64::MIN_POSITIVE)).min(0.1);
    let mut search = *window;
    if window.im_min < 0.0 && window.im_max > -lift && window.im_max < lift {
        search.im_max = lift;
    }
    let real = det.remove_real_zeros(&search, samples);
    let det = det;
    let f = |z: C64| det.value(z);
    for &(x, multiplicity, residual) in &real {
        if window.inflate(opts.real_axis_tol).contains(c(x, 0.0)) {
            set.bound_states.push(Pole {
                k: c(x, 0.0),
                multiplicity,
                residual,
                iterations: 0,
                upper_half_plane: false,
            });
        }
    }
    let mut root = None;
    let mut last_zero = search.center();
    for attempt in 0..=8usize {
        let rect = if attempt == 0 {
            search
        } else {
            let size = 10f64.powi(attempt.div_ceil(2) as i32 - 7);
            search.inflate(if attempt % 2 == 1 { -size } else { size })
        };
        match winding_number_spaced(f, &rect, samples, det.max_step) {
            Ok(w) => {
                root = Some((rect, w));
                break;
            }
            Err(ContourError::BoundaryZero(z)) | Err(ContourError::NonFinite(z)) => last_zero = z,
            Err(ContourError::Degenerate) => return Err(ResonanceError::InvalidWindow),
        }
    }
    let Some((root_rect, root_w)) = root else {
        return Err(ResonanceError::BoundaryZero(last_zero));
    };

    let mut level = vec![(root_rect, root_w)];
    let mut candidates: Vec<(C64, usize, Refined)> = Vec::new();
    let mut cells = 0usize;
    while !level.is_empty() {
        cells += level.len();
        if cells > opts.max_cells {
            return Err(ResonanceError::TooManyCells(opts.max_cells));
        }
        let outcomes: Vec<CellOutcome> = level
            .par_iter()
            .filter(|(_, w)| *w != 0)
            .map(|&(rect, w)| process_cell(&det, rect, w, samples, opts))
            .collect();
        let mut next = Vec::new();
        for o in outcomes {
            match o {
                CellOutcome::Found(k, m, r) => candidates.push((k, m, r)),
                CellOutcome::Split(children) => next.extend(children),
                CellOutcome::Unresolved(rect, w) => set.warnings.push(format!(
                    "cell [{:.9e}, {:.9e}] x [{:.9e}, {:.9e}] with winding {w} did not yield an accepted zero",
                    rect.re_min, rect.re_max, rect.im_min, rect.im_max
                )),
            }
        }
        level = next;
    }

    candidates.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut merged: Vec<(C64, usize, Refined)> = Vec::new();
    for cand in candidates {
        match merged.iter_mut().find(|m| (m.0 - cand.0).norm() <= opts.dedup_radius) {
            // Distinct cells count distinct zeros, so a numerically split
            // multiple zero keeps its full multiplicity.
            Some(m) => {
                m.1 += cand.1;
                if cand.2.residual < m.2.residual {
                    m.2 = cand.2;
                    m.0 = cand.0;
                }
            }
            None => merged.push(cand),
        }
    }
    for (k, multiplicity, r) in merged {
        if k.norm() <= opts.real_axis_tol {
            continue;
        }
        if !window.inflate(opts.real_axis_tol).contains(k) {
            if k.im > opts.real_axis_tol && window.contains(c(k.re, window.im_max)) {
                set.warnings.push(format!("zero of D above the window at {k}"));
            }
            continue;
        }
        let pole = Pole {
            k,
            multiplicity,
            residual: r.residual,
            iterations: r.iterations,
            upper_half_plane: k.im > opts.real_axis_tol,
        };
        if k.im.abs() <= opts.real_axis_tol {
            set.bound_states.push(pole);
        } else {
            set.poles.push(pole);
        }
    }
    if set.has_upper_half_plane() {
        set.warnings.push("zeros of D found in the upper half plane".to_string());
    }
    Ok(set)
}

fn process_cell(det: &Determinant, rect: Rect, w: i64, samples: usize, opts: &PoleOptions) -> CellOutcome {
    let size = rect.width().max(rect.height());
    let slack = 1e-9 * size;
    if w == 1 {
        let keep = |z: C64, _| rect.inflate(size).contains(z);
        if let Ok(r) = det.newton(rect.center(), 1, keep) {
            if rect.inflate(slack).contains(r.k) && r.residual <= opts.residual_tol {
                return CellOutcome::Found(r.k, 1, r);
            }
        }
    }
    if size <= opts.min_cell || w < 0 {
        return resolve_in_place(det, rect, w, opts);
    }
    let f = |z: C64| det.value(z);
    for attempt in 0..6 {
        let at = if attempt == 0 {
            rect.center()
        } else {
            let t = 0.06 * attempt as f64;
            let sign = if attempt % 2 == 0 { 1.0 } else { -1.0 };
            rect.center() + c(sign * t * rect.width(), -0.61 * t * rect.height())
        };
        let children = rect.split_at(at);
        let windings: Result<Vec<i64>, ContourError> = children
            .iter()
            .map(|r| winding_number_spaced(f, r, samples, det.max_step))
            .collect();
        if let Ok(ws) = windings {
            if ws.iter().sum::<i64>() == w {
                return CellOutcome::Split(children.into_iter().zip(ws).collect());
            }
        }
    }
    // Split lines keep grazing a zero: the cell is at the resolution limit.
    resolve_in_place(det, rect, w, opts)
}

/// Modified Newton with the cell's winding as multiplicity.
fn resolve_in_place(det: &Determinant, rect: Rect, w: i64, opts: &PoleOptions) -> CellOutcome {
    let size = rect.width().max(rect.height());
    let m = w.max(1) as usize;
    let keep = |z: C64, _| rect.inflate(10.0 * size).contains(z);
    match det.newton(rect.center(), m, keep) {
        Ok(r) if r.residual <= opts.residual_tol => CellOutcome::Found(r.k, m, r),
        _ => {
            // A multiple zero defeats the difference derivative close up.
            let k = rect.center();
            let residual = det.normalized_residual(k);
            if residual <= opts.residual_tol && size <= 1e3 * opts.min_cell {
                CellOutcome::Found(k, m, Refined { k, residual, iterations: 0 })
            } else {
                CellOutcome::Unresolved(rect, w)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{attach_leads, build_graph, GraphDescription, VertexCondition};

    fn two_dirichlet_edges() -> OpenGraph {
        let g = build_graph(
            &GraphDescription::default()
                .vertex("v", VertexCondition::neumann())
                .vertex("a", VertexCondition::dirichlet())
                .vertex("b", VertexCondition::dirichlet())
                .edge("1", "v", "a", 1.0)
                .edge("2", "v", "b", 1.0),
        )
        .unwrap();
        attach_leads(&g, &["v"]).unwrap()
    }

    fn analytic(m: usize) -> C64 {
        c((2 * m + 1) as f64 * PI / 2.0, -(3f64).ln() / 2.0)
    }

    #[test]
    fn star_has_no_poles() {
        let g = build_graph(&GraphDescription::default().vertex("v", VertexCondition::neumann())).unwrap();
        let og = attach_leads(&g, &["v"; 6]).unwrap();
        let ps = find_poles(&og, &Rect::new(0.0, 10.0, -2.0, 0.0), &PoleOptions::default()).unwrap();
        assert!(ps.poles.is_empty());
    }

    #[test]
    fn single_pole_in_small_window() {
        let ps = find_poles(&two_dirichlet_edges(), &Rect::new(0.0, 4.0, -2.0, 0.0), &PoleOptions::default()).unwrap();
        assert_eq!(ps.poles.len(), 1);
        assert!((ps.poles[0].k - analytic(0)).norm() < 1e-10);
        assert_eq!(ps.poles[0].multiplicity, 1);
    }

    #[test]
    fn three_poles_in_wide_window() {
        let ps = find_poles(&two_dirichlet_edges(), &Rect::new(0.0, 10.0, -2.0, 0.0), &PoleOptions::default()).unwrap();
        assert_eq!(ps.poles.len(), 3);
        for (m, p) in ps.poles.iter().enumerate() {
            assert!((p.k - analytic(m)).norm() < 1e-10);
            assert!(p.residual <= 1e-8);
            assert!(!p.upper_half_plane);
        }
    }

    #[test]
    fn bound_states_are_separate() {
        let ps = find_poles(&two_dirichlet_edges(), &Rect::new(1.0, 7.0, -1.0, 0.5), &PoleOptions::default()).unwrap();
        let bound: Vec<f64> = ps.bound_states.iter().map(|p| p.k.re).collect();
        assert_eq!(bound.len(), 2);
        assert!((bound[0] - PI).abs() < 1e-9 && (bound[1] - 2.0 * PI).abs() < 1e-9);
        assert_eq!(ps.poles.len(), 2);
    }

    #[test]
    fn refine_converges_from_nearby() {
        let r = refine_pole(&two_dirichlet_edges(), c(1.5, -0.5)).unwrap();
        assert!((r.k - analytic(0)).norm() < 1e-10);
    }

    #[test]
    fn refine_emits_no_false_pole() {
        match refine_pole(&two_dirichlet_edges(), c(0.3, -0.05)) {
            Err(_) => {}
            Ok(r) => assert!(r.residual > 1e-8 || r.k.im.abs() <= 1e-8, "false pole at {}", r.k),
        }
    }

    #[test]
    fn refine_at_exact_zero_takes_no_steps() {
        let og = two_dirichlet_edges();
        let sys = ScatteringSystem::new(&og).unwrap();
        let r = refine_pole(&og, analytic(0)).unwrap();
        assert!(r.iterations <= 1);
        assert!(sys.interior_det_raw(r.k).unwrap().norm() < 1e-12);
    }

    #[test]
    fn k_dependent_conditions_rejected() {
        let g = build_graph(
            &GraphDescription::default()
                .vertex("v", VertexCondition::neumann())
                .vertex(
                    "w",
                    VertexCondition::LinearAb {
                        a: linalg::from_real_rows(&[&[1.0]]),
                        b: linalg::from_real_rows(&[&[0.5]]),
                    },
                )
                .edge("e", "v", "w", 1.0),
        )
        .unwrap();
        let og = attach_leads(&g, &["v"]).unwrap();
        assert_eq!(
            find_poles(&og, &Rect::new(0.0, 1.0, -1.0, 0.0), &PoleOptions::default()),
            Err(ResonanceError::NonHolomorphic)
        );
    }
}
