//! Isophasal, isopolar and conjugacy relations between scattering systems.
//!
//! Conjugacy is decided by sampling: every verdict here is numerical
//! evidence, not a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::OpenGraph;
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::resonances::{find_poles, Pole, PoleOptions, PoleSet, Rect, ResonanceError};
use crate::scattering::{ScatteringError, ScatteringSystem};
use crate::symmetry::SymmetryError;

pub const CONJUGATOR_NULL_TOL: f64 = 1e-10;
pub const INVERTIBLE_TOL: f64 = 1e-8;
pub const HOLDOUT_TOL: f64 = 1e-8;
pub const ISOPHASAL_TOL: f64 = 1e-9;
pub const ISOPOLAR_TOL: f64 = 1e-6;
pub const EVIDENCE_LABEL: &str = "numerical evidence";

const RANDOM_TRIALS: usize = 20;
const SEED: u64 = 0x1505_CA77;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsoError {
    #[error("matrix functions have different sizes ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("at least {needed} training samples are required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample k = {0} hits a singular interior")]
    SampleAtSingularity(f64),
    #[error("pole sets were computed on different windows or with different options")]
    WindowMismatch,
    #[error(transparent)]
    Scattering(ScatteringError),
    #[error(transparent)]
    Symmetry(SymmetryError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}

impl From<ScatteringError> for IsoError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::SingularInterior { k, .. } => IsoError::SampleAtSingularity(k.re),
            other => IsoError::Scattering(other),
        }
    }
}

impl From<SymmetryError> for IsoError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Scattering(s) => s.into(),
            other => IsoError::Symmetry(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugacyStatus {
    Found,
    NotFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyResult {
    pub status: ConjugacyStatus,
    /// Conjugator scaled to unit spectral norm, when one was found.
    pub pi: Option<CMatrix>,
    /// Max over holdout samples of `‖Π S₁ − S₂ Π‖_F`; NaN without a candidate.
    pub residual: f64,
    pub solution_dim: usize,
    /// Orthonormal basis of the sampled solution space, as matrices.
    pub basis: Vec<CMatrix>,
    pub training: Vec<f64>,
    pub holdout: Vec<f64>,
}

impl ConjugacyResult {
    /// Distance of `pi` (scaled to unit Frobenius norm) from the sampled solution space.
    pub fn distance_to_solution_space(&self, pi: &CMatrix) -> f64 {
        let norm = linalg::frobenius(pi);
        if norm == 0.0 {
            return 0.0;
        }
        let x = linalg::vectorize(pi) / c(norm, 0.0);
        let mut r = x.clone();
        for b in &self.basis {
            let bv = linalg::vectorize(b);
            r -= &bv * bv.dotc(&x);
        }
        r.norm()
    }
}

/// `n` points of the golden-ratio sequence mapped into `(lo, hi]`.
pub fn low_discrepancy_samples(n: usize, lo: f64, hi: f64, offset: f64) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let t = (offset + j as f64 * GOLDEN).fract();
            let t = if t == 0.0 { 1.0 } else { t };
            lo + (hi - lo) * t
        })
        .collect()
}

pub fn default_training_samples() -> Vec<f64> {
    low_discrepancy_samples(6, 0.5, 15.0, 0.0)
}

pub fn default_holdout_samples() -> Vec<f64> {
    low_discrepancy_samples(5, 0.5, 15.0, 0.5)
}

/// 64 evenly spaced points in `(0.1, 20]`.
pub fn default_phase_samples() -> Vec<f64> {
    (1..=64).map(|j| 0.1 + 19.9 * j as f64 / 64.0).collect()
}

fn max_residual<F1, F2>(s1: &F1, s2: &F2, pi: &CMatrix, ks: &[f64]) -> Result<f64, IsoError>
where
    F1: Fn(f64) -> Result<CMatrix, IsoError>,
    F2: Fn(f64) -> Result<CMatrix, IsoError>,
{
    let mut worst = 0.0f64;
    for &k in ks {
        let a = s1(k)?;
        let b = s2(k)?;
        worst = worst.max(linalg::frobenius(&(pi * &a - &b * pi)));
    }
    Ok(worst)
}

fn unit_spectral(m: &CMatrix) -> Option<CMatrix> {
    let s = linalg::spectral_norm(m);
    (s > 0.0).then(|| m / c(s, 0.0))
}

fn invertible(m: &CMatrix) -> bool {
    linalg::det(m).norm() > INVERTIBLE_TOL
}

/// Looks for a `k`-independent invertible `Π` with `Π S₁(k) = S₂(k) Π`.
///
/// `training` fixes the linear system; `holdout` validates the candidate.
pub fn find_conjugator<F1, F2>(s1: F1, s2: F2, training: &[f64], holdout: &[f64]) -> Result<ConjugacyResult, IsoError>
where
    F1: Fn(f64) -> Result<CMatrix, IsoError>,
    F2: Fn(f64) -> Result<CMatrix, IsoError>,
{
    if training.len() < 3 {
        return Err(IsoError::TooFewSamples {
            needed: 3,
            got: training.len(),
        });
    }
    let mut blocks = Vec::with_capacity(training.len());
    let mut n = None;
    let mut scale = 0.0f64;
    for &k in training {
        let a = s1(k)?;
        let b = s2(k)?;
        if a.nrows() != b.nrows() {
            return Err(IsoError::DimensionMismatch(a.nrows(), b.nrows()));
        }
        let size = a.nrows();
        n = Some(size);
        scale = scale.max(linalg::spectral_norm(&a) + linalg::spectral_norm(&b));
        // vec(Π A) = (Aᵀ ⊗ I) vec Π,  vec(B Π) = (I ⊗ B) vec Π.
        blocks.push(linalg::kron(&a.transpose(), &linalg::identity(size)) - linalg::kron(&linalg::identity(size), &b));
    }
    let n = n.unwrap_or(0);
    let cols = n * n;
    let mut stacked = CMatrix::zeros(cols * blocks.len(), cols);
    for (i, b) in blocks.iter().enumerate() {
        stacked.view_mut((i * cols, 0), (cols, cols)).copy_from(b);
    }
    let null = linalg::null_space_scaled(&stacked, CONJUGATOR_NULL_TOL, scale);
    let basis: Vec<CMatrix> = null.iter().map(|v| linalg::unvectorize(v, n, n)).collect();
    let mut result = ConjugacyResult {
        status: ConjugacyStatus::NotFound,
        pi: None,
        residual: f64::NAN,
        solution_dim: basis.len(),
        basis,
        training: training.to_vec(),
        holdout: holdout.to_vec(),
    };
    if n == 0 {
        result.status = ConjugacyStatus::Found;
        result.pi = Some(CMatrix::zeros(0, 0));
        result.residual = 0.0;
        return Ok(result);
    }
    let mut candidate = result
        .basis
        .iter()
        .filter_map(unit_spectral)
        .find(invertible);
    if candidate.is_none() && !null.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..RANDOM_TRIALS {
            let mut coeffs = CVector::from_fn(null.len(), |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let norm = coeffs.norm();
            if norm == 0.0 {
                continue;
            }
            coeffs /= c(norm, 0.0);
            let combo = result
                .basis
                .iter()
                .zip(coeffs.iter())
                .fold(CMatrix::zeros(n, n), |acc, (b, &w)| acc + b * w);
            if let Some(m) = unit_spectral(&combo).filter(invertible) {
                candidate = Some(m);
                break;
            }
        }
    }
    let Some(pi) = candidate else {
        return Ok(result);
    };
    result.residual = max_residual(&s1, &s2, &pi, holdout)?;
    result.status = if result.residual <= HOLDOUT_TOL {
        ConjugacyStatus::Found
    } else {
        ConjugacyStatus::Inconclusive
    };
    result.pi = Some(pi);
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseComparison {
    pub isophasal: bool,
    pub max_deviation: f64,
}

/// Compares `det S₁(k)` and `det S₂(k)` directly on the unit circle.
pub fn isophasal_check<F1, F2>(s1: F1, s2: F2, samples: &[f64], tol: f64) -> Result<PhaseComparison, IsoError>
where
    F1: Fn(f64) -> Result<CMatrix, IsoError>,
    F2: Fn(f64) -> Result<CMatrix, IsoError>,
{
    let mut worst = 0.0f64;
    for &k in samples {
        let d1 = linalg::det(&s1(k)?);
        let d2 = linalg::det(&s2(k)?);
        worst = worst.max((d1 - d2).norm());
    }
    Ok(PhaseComparison {
        isophasal: worst <= tol,
        max_deviation: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolePair {
    pub first: C64,
    pub second: C64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolePairing {
    pub isopolar: bool,
    pub pairs: Vec<PolePair>,
    pub unmatched_first: Vec<C64>,
    pub unmatched_second: Vec<C64>,
}

fn expand(set: &PoleSet) -> Vec<C64> {
    set.poles
        .iter()
        .chain(&set.bound_states)
        .flat_map(|p: &Pole| std::iter::repeat(p.k).take(p.multiplicity.max(1)))
        .collect()
}

/// Greedy nearest pairing, each pole counted with its multiplicity.
pub fn isopolar_check(p1: &PoleSet, p2: &PoleSet, tol: f64) -> Result<PolePairing, IsoError> {
    if p1.window != p2.window || p1.options != p2.options {
        return Err(IsoError::WindowMismatch);
    }
    let a = expand(p1);
    let b = expand(p2);
    let mut candidates: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| b.iter().enumerate().map(move |(j, y)| ((x - y).norm(), i, j)))
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if d > tol {
            break;
        }
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push(PolePair {
                first: a[i],
                second: b[j],
                distance: d,
            });
        }
    }
    let unmatched_first: Vec<C64> = a.iter().zip(&used_a).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    let unmatched_second: Vec<C64> = b.iter().zip(&used_b).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    Ok(PolePairing {
        isopolar: a.len() == b.len() && unmatched_first.is_empty() && unmatched_second.is_empty(),
        pairs,
        unmatched_first,
        unmatched_second,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Transplantable,
    /// No conjugator although the total phases agree on every sample.
    IsophasalWithoutConjugator,
    NoTransplantation,
    Inconclusive,
}

impl Verdict {
    pub fn describe(self) -> &'static str {
        match self {
            Verdict::Transplantable => "transplantable (evidence)",
            Verdict::IsophasalWithoutConjugator => {
                "no transplantation on these lead sets (isophasal, evidence against transplantation)"
            }
            Verdict::NoTransplantation => "no transplantation on these lead sets",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictOptions {
    pub window: Rect,
    pub training: Vec<f64>,
    pub holdout: Vec<f64>,
    pub phase_samples: Vec<f64>,
    pub poles: PoleOptions,
}

impl VerdictOptions {
    pub fn new(window: Rect) -> Self {
        VerdictOptions {
            window,
            training: default_training_samples(),
            holdout: default_holdout_samples(),
            phase_samples: default_phase_samples(),
            poles: PoleOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub label: &'static str,
    pub conjugacy: ConjugacyResult,
    pub phases: PhaseComparison,
    /// Absent when either system has `k`-dependent vertex conditions.
    pub poles: Option<(PoleSet, PoleSet, PolePairing)>,
    pub warnings: Vec<String>,
}

/// Conjugacy, phase and pole comparison of two open graphs with the same number of leads.
pub fn transplantability_verdict(og1: &OpenGraph, og2: &OpenGraph, opts: &VerdictOptions) -> Result<VerdictReport, IsoError> {
    if og1.lead_count() != og2.lead_count() {
        return Err(IsoError::DimensionMismatch(og1.lead_count(), og2.lead_count()));
    }
    let sys1 = ScatteringSystem::new(og1)?;
    let sys2 = ScatteringSystem::new(og2)?;
    let f1 = |k: f64| sys1.s_matrix(c(k, 0.0)).map_err(IsoError::from);
    let f2 = |k: f64| sys2.s_matrix(c(k, 0.0)).map_err(IsoError::from);
    let conjugacy = find_conjugator(f1, f2, &opts.training, &opts.holdout)?;
    let phases = isophasal_check(f1, f2, &opts.phase_samples, ISOPHASAL_TOL)?;
    let mut warnings = Vec::new();
    let poles = match (find_poles(og1, &opts.window, &opts.poles), find_poles(og2, &opts.window, &opts.poles)) {
        (Ok(a), Ok(b)) => {
            let pairing = isopolar_check(&a, &b, ISOPOLAR_TOL)?;
            Some((a, b, pairing))
        }
        (Err(ResonanceError::NonHolomorphic), _) | (_, Err(ResonanceError::NonHolomorphic)) => {
            warnings.push("pole comparison skipped: k-dependent vertex conditions".to_string());
            None
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    let isopolar = poles.as_ref().map(|p| p.2.isopolar);
    let verdict = match conjugacy.status {
        ConjugacyStatus::Found => Verdict::Transplantable,
        ConjugacyStatus::NotFound if phases.isophasal => Verdict::IsophasalWithoutConjugator,
        ConjugacyStatus::NotFound => Verdict::NoTransplantation,
        ConjugacyStatus::Inconclusive if isopolar == Some(false) => Verdict::NoTransplantation,
        ConjugacyStatus::Inconclusive => Verdict::Inconclusive,
    };
    if conjugacy.status == ConjugacyStatus::Found && isopolar == Some(false) {
        warnings.push("conjugator found but pole sets differ; pole search may be incomplete".to_string());
    }
    Ok(VerdictReport {
        verdict,
        label: EVIDENCE_LABEL,
        conjugacy,
        phases,
        poles,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;

    fn constant(m: CMatrix) -> impl Fn(f64) -> Result<CMatrix, IsoError> {
        move |_| Ok(m.clone())
    }

    fn quotient_pair() -> (CMatrix, CMatrix) {
        let s1 = from_real_rows(&[&[-1.0, 2.0, 2.0], &[2.0, -1.0, 2.0], &[2.0, 2.0, -1.0]]) / c(3.0, 0.0);
        let s2 = from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, -1.0]]);
        (s1, s2)
    }

    #[test]
    fn quotient_pair_is_conjugate() {
        let (s1, s2) = quotient_pair();
        let r = find_conjugator(constant(s1.clone()), constant(s2.clone()), &default_training_samples(), &default_holdout_samples()).unwrap();
        assert_eq!(r.status, ConjugacyStatus::Found);
        let pi = from_real_rows(&[&[1.0, 1.0, 1.0], &[1.0, -1.0, 0.0], &[1.0, 0.0, -1.0]]);
        assert!(linalg::frobenius(&(&pi * &s1 - &s2 * &pi)) <= 1e-12);
        assert!(r.distance_to_solution_space(&pi) < 1e-10);
        // Eigenvalue 1 once and −1 twice on both sides.
        assert_eq!(r.solution_dim, 5);
    }

    #[test]
    fn self_conjugate_contains_identity() {
        let s = from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let r = find_conjugator(constant(s.clone()), constant(s), &default_training_samples(), &default_holdout_samples()).unwrap();
        assert_eq!(r.status, ConjugacyStatus::Found);
        assert!(r.distance_to_solution_space(&linalg::identity(2)) < 1e-10);
    }

    #[test]
    fn equal_scalars_are_conjugate() {
        // The stacked system vanishes up to rounding; it must still count as singular.
        let z = C64::from_polar(1.0, 1.1);
        let s1 = move |_: f64| Ok(CMatrix::from_element(1, 1, z));
        let s2 = move |_: f64| Ok(CMatrix::from_element(1, 1, z * c(1.0 + 2.0 * f64::EPSILON, 0.0)));
        let r = find_conjugator(s1, s2, &default_training_samples(), &default_holdout_samples()).unwrap();
        assert_eq!(r.status, ConjugacyStatus::Found);
        assert_eq!(r.solution_dim, 1);
    }

    #[test]
    fn spectral_obstruction() {
        let s1 = from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let s2 = |k: f64| {
            let mut m = from_real_rows(&[&[0.0, 0.0], &[0.0, -1.0]]);
            m[(0, 0)] = C64::from_polar(1.0, k);
            Ok(m)
        };
        let r = find_conjugator(constant(s1), s2, &default_training_samples(), &default_holdout_samples()).unwrap();
        assert_eq!(r.status, ConjugacyStatus::NotFound);
    }

    #[test]
    fn sample_count_and_size_checks() {
        let a = linalg::identity(2);
        let b = linalg::identity(3);
        assert!(matches!(
            find_conjugator(constant(a.clone()), constant(a.clone()), &[1.0, 2.0], &[]),
            Err(IsoError::TooFewSamples { .. })
        ));
        assert_eq!(
            find_conjugator(constant(a), constant(b), &[1.0, 2.0, 3.0], &[]),
            Err(IsoError::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn phases() {
        let (s1, s2) = quotient_pair();
        // Direct 3×3 determinants of both matrices equal one.
        let d1 = s1[(0, 0)] * (s1[(1, 1)] * s1[(2, 2)] - s1[(1, 2)] * s1[(2, 1)])
            - s1[(0, 1)] * (s1[(1, 0)] * s1[(2, 2)] - s1[(1, 2)] * s1[(2, 0)])
            + s1[(0, 2)] * (s1[(1, 0)] * s1[(2, 1)] - s1[(1, 1)] * s1[(2, 0)]);
        assert!((d1 - 1.0).norm() < 1e-14);
        let r = isophasal_check(constant(s1.clone()), constant(s2), &default_phase_samples(), ISOPHASAL_TOL).unwrap();
        assert!(r.isophasal);
        let same = isophasal_check(constant(s1.clone()), constant(s1), &[1.0], ISOPHASAL_TOL).unwrap();
        assert_eq!(same.max_deviation, 0.0);
        let one = constant(linalg::identity(1));
        let minus = constant(-linalg::identity(1));
        assert!(!isophasal_check(one, minus, &[1.0], ISOPHASAL_TOL).unwrap().isophasal);
    }

    fn pole_set(ks: &[C64]) -> PoleSet {
        PoleSet {
            poles: ks
                .iter()
                .map(|&k| Pole {
                    k,
                    multiplicity: 1,
                    residual: 0.0,
                    iterations: 0,
                    upper_half_plane: false,
                })
                .collect(),
            bound_states: Vec::new(),
            window: Rect::new(0.0, 10.0, -2.0, 0.0),
            options: PoleOptions::default(),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn pole_pairing() {
        let a = pole_set(&[c(1.0, -0.5), c(2.0, -0.5)]);
        let b = pole_set(&[c(2.0, -0.5 + 1e-9), c(1.0, -0.5)]);
        assert!(isopolar_check(&a, &b, ISOPOLAR_TOL).unwrap().isopolar);
        assert!(isopolar_check(&a, &a, ISOPOLAR_TOL).unwrap().isopolar);
        assert!(isopolar_check(&pole_set(&[]), &pole_set(&[]), ISOPOLAR_TOL).unwrap().isopolar);
        let c3 = pole_set(&[c(1.0, -0.5)]);
        let r = isopolar_check(&a, &c3, ISOPOLAR_TOL).unwrap();
        assert!(!r.isopolar);
        assert_eq!(r.unmatched_first.len(), 1);
        let mut d = pole_set(&[]);
        d.window = Rect::new(0.0, 5.0, -2.0, 0.0);
        assert_eq!(isopolar_check(&a, &d, ISOPOLAR_TOL), Err(IsoError::WindowMismatch));
    }

    #[test]
    fn samples_lie_in_range() {
        for k in default_training_samples() {
            assert!(k > 0.5 && k <= 15.0);
        }
        let p = default_phase_samples();
        assert_eq!(p.len(), 64);
        assert!(p[0] > 0.1 && (p[63] - 20.0).abs() < 1e-12);
    }
}
