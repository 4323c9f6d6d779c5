//! Rectangles in the complex plane and the argument principle on their boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, C64};

/// Magnitude below which a boundary sample is treated as a zero.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ContourError {
    #[error("function vanishes on the contour near {0}")]
    BoundaryZero(C64),
    #[error("function is not finite on the contour at {0}")]
    NonFinite(C64),
    #[error("degenerate rectangle")]
    Degenerate,
}

/// Closed axis-aligned rectangle `[re_min, re_max] × [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Rect {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> C64 {
        c(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Strictly inside, at least `margin` from every side.
    pub fn contains_strictly(&self, z: C64, margin: f64) -> bool {
        z.re > self.re_min + margin
            && z.re < self.re_max - margin
            && z.im > self.im_min + margin
            && z.im < self.im_max - margin
    }

    /// Grows (`delta > 0`) or shrinks every side by `delta`.
    pub fn inflate(&self, delta: f64) -> Rect {
        Rect::new(self.re_min - delta, self.re_max + delta, self.im_min - delta, self.im_max + delta)
    }

    /// Four quadrants split at `at`, ordered SW, SE, NE, NW.
    pub fn split_at(&self, at: C64) -> [Rect; 4] {
        [
            Rect::new(self.re_min, at.re, self.im_min, at.im),
            Rect::new(at.re, self.re_max, self.im_min, at.im),
            Rect::new(at.re, self.re_max, at.im, self.im_max),
            Rect::new(self.re_min, at.re, at.im, self.im_max),
        ]
    }

    pub fn split4(&self) -> [Rect; 4] {
        self.split_at(self.center())
    }

    pub fn corners(&self) -> [C64; 4] {
        [
            c(self.re_min, self.im_min),
            c(self.re_max, self.im_min),
            c(self.re_max, self.im_max),
            c(self.re_min, self.im_max),
        ]
    }
}

/// Winding number of `f` around the counter-clockwise boundary of `rect`.
///
/// Each side starts with `samples` equal steps; any step whose phase change
/// reaches π/2 is bisected until it does not.
pub fn winding_number<F>(f: F, rect: &Rect, samples: usize) -> Result<i64, ContourError>
where
    F: Fn(C64) -> C64,
{
    winding_number_spaced(f, rect, samples, f64::INFINITY)
}

/// As [`winding_number`], with at least enough initial steps per side that
/// none is longer than `max_step`.
///
/// For `f` a sum of exponentials `e^{iλk}` with `0 ≤ λ ≤ Λ`, a `max_step` of
/// `π/(4Λ)` keeps the sampled phase from aliasing away from zeros.
pub fn winding_number_spaced<F>(f: F, rect: &Rect, samples: usize, max_step: f64) -> Result<i64, ContourError>
where
    F: Fn(C64) -> C64,
{
    if !rect.is_valid() {
        return Err(ContourError::Degenerate);
    }
    let corners = rect.corners();
    let samples = samples.max(1);
    let eval = |z: C64| -> Result<C64, ContourError> {
        let w = f(z);
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(ContourError::NonFinite(z));
        }
        if w.norm() <= BOUNDARY_ZERO_TOL {
            return Err(ContourError::BoundaryZero(z));
        }
        Ok(w)
    };
    let mut total = 0.0;
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        let mut za = a;
        let mut fa = eval(a)?;
        let needed = ((b - a).norm() / max_step).ceil();
        let samples = if needed.is_finite() { samples.max(needed as usize) } else { samples };
        for s in 1..=samples {
            let zb = if s == samples { b } else { a + (b - a) * (s as f64 / samples as f64) };
            let fb = eval(zb)?;
            total += segment_phase(&eval, za, fa, zb, fb, 0)?;
            za = zb;
            fa = fb;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn segment_phase<E>(eval: &E, za: C64, fa: C64, zb: C64, fb: C64, depth: u32) -> Result<f64, ContourError>
where
    E: Fn(C64) -> Result<C64, ContourError>,
{
    let step = (fb / fa).arg();
    if step.abs() < PI / 2.0 {
        return Ok(step);
    }
    if depth >= MAX_DEPTH || (zb - za).norm() <= 1e-15 * (1.0 + za.norm()) {
        return Err(ContourError::BoundaryZero(0.5 * (za + zb)));
    }
    let zm = 0.5 * (za + zb);
    let fm = eval(zm)?;
    Ok(segment_phase(eval, za, fa, zm, fm, depth + 1)? + segment_phase(eval, zm, fm, zb, fb, depth + 1)?)
}
