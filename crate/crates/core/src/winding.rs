//! Variation of angle and fixed-point indices.
//!
//! For two paths `δ, γ : [0, 1] -> R²` the variation of angle `i(δ, γ)` is the
//! total turning of `γ(t) - δ(t)` divided by 2π. The index of an isolated
//! fixed point `z` of `f` is `i(γ, f ∘ γ)` for a small circle `γ` around `z`.
//! On the periodic domains every path is taken in lifted coordinates, so the
//! differences are continuous without any reduction modulo 2π.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{Point, INTERIOR_MARGIN, TWO_PI};
use crate::revmaps::MapSpec;

/// Initial number of parameter intervals before adaptive refinement.
pub const DEFAULT_SAMPLES: usize = 256;
pub const MAX_DEPTH: u32 = 40;
/// Smallest admissible `|γ(t) - δ(t)|`.
pub const SEP_MIN: f64 = 1e-12;
pub const INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("a polyline needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("paths collide at t = {t}: separation {separation:e}")]
    Collision { t: f64, separation: f64 },
    #[error("angle refinement exceeded depth {MAX_DEPTH} near t = {t}")]
    DepthExceeded { t: f64 },
    #[error("{0} is not an interior point of the domain")]
    NotInterior(Point),
    #[error("loop passes within {separation:e} of a fixed point at {point}")]
    HitsFixedPoint { point: Point, separation: f64 },
    #[error("a closed loop is required")]
    NotClosed,
    #[error("catenation needs matching endpoints: {0} vs {1}")]
    Mismatch(Point, Point),
}

/// Ordered point list; a closed polyline implicitly joins its last point to
/// its first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(mut points: Vec<Point>, closed: bool) -> Result<Self, WindingError> {
        if closed && points.len() > 2 && points.first() == points.last() {
            points.pop();
        }
        if points.len() < 2 {
            return Err(WindingError::TooFewPoints(points.len()));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(WindingError::RepeatedPoint(i, i + 1));
        }
        Ok(Self { points, closed })
    }

    /// The constant loop at `p`, the one exception to distinct vertices.
    pub fn constant(p: Point) -> Self {
        Self {
            points: vec![p],
            closed: true,
        }
    }

    /// Counter-clockwise circle with `n` vertices.
    pub fn circle(center: Point, radius: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|i| {
                let t = TWO_PI * i as f64 / n as f64;
                center + Point::new(radius * t.cos(), radius * t.sin())
            })
            .collect();
        Self {
            points,
            closed: true,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn segments(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    /// Vertex-uniform parametrization over `[0, 1]`.
    pub fn at(&self, t: f64) -> Point {
        let m = self.segments();
        let u = t.clamp(0.0, 1.0) * m as f64;
        let i = (u.floor() as usize).min(m - 1);
        let a = self.points[i];
        let b = self.points[(i + 1) % self.points.len()];
        a.lerp(b, u - i as f64)
    }

    /// Parameters of the vertices.
    pub fn breakpoints(&self) -> Vec<f64> {
        let m = self.segments() as f64;
        (0..=self.segments()).map(|i| i as f64 / m).collect()
    }

    /// `γ̄(t) = γ(1 - t)`.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        if self.closed {
            // keep the base point so the closed loop starts where it did
            points[1..].reverse();
        } else {
            points.reverse();
        }
        Self {
            points,
            closed: self.closed,
        }
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
            closed: self.closed,
        }
    }

    /// `I ∘ γ` in lifted coordinates.
    pub fn reflected(&self) -> Self {
        self.map(|p| Point::new(-p.x, p.y))
    }

    /// `δ₁ * δ₂`: first `δ₁`, then `δ₂`. The parametrization matches the
    /// usual `δ₁(2t)`, `δ₂(2t - 1)` when both have the same number of vertices.
    pub fn catenate(&self, other: &Polyline) -> Result<Self, WindingError> {
        let (end, start) = (*self.points.last().unwrap(), other.points[0]);
        if self.closed || other.closed || end != start {
            return Err(WindingError::Mismatch(end, start));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Self {
            points,
            closed: false,
        })
    }

    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..self.segments())
            .map(|i| (self.points[(i + 1) % n] - self.points[i]).norm())
            .sum()
    }
}

/// A variation of angle, integral when both paths are closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub value: f64,
    pub is_integer_certified: bool,
}

impl IndexValue {
    pub fn rounded(&self) -> Option<i64> {
        self.is_integer_certified.then(|| self.value.round() as i64)
    }
}

/// Total turning of `d(t)` over `[0, 1]`, in units of full turns.
///
/// `breaks` seeds the parameter grid; every interval is bisected until the
/// angle increment is below π/2.
pub fn turning(d: impl Fn(f64) -> Point, breaks: &[f64], closed: bool) -> Result<IndexValue, WindingError> {
    let sample = |t: f64| -> Result<Point, WindingError> {
        let v = d(t);
        let n = v.norm();
        if !(n > SEP_MIN) {
            return Err(WindingError::Collision { t, separation: n });
        }
        Ok(v)
    };
    let mut total = 0.0;
    let mut prev_t = breaks[0];
    let mut prev = sample(prev_t)?;
    for &t in &breaks[1..] {
        let cur = sample(t)?;
        total += refine(&sample, prev_t, prev, t, cur, 0)?;
        prev_t = t;
        prev = cur;
    }
    let value = total / TWO_PI;
    Ok(IndexValue {
        value,
        is_integer_certified: closed && (value - value.round()).abs() < INTEGER_TOL,
    })
}

fn refine(
    sample: &impl Fn(f64) -> Result<Point, WindingError>,
    ta: f64,
    a: Point,
    tb: f64,
    b: Point,
    depth: u32,
) -> Result<f64, WindingError> {
    let dtheta = a.cross(b).atan2(a.dot(b));
    if dtheta.abs() < FRAC_PI_2 {
        return Ok(dtheta);
    }
    if depth >= MAX_DEPTH {
        return Err(WindingError::DepthExceeded { t: ta });
    }
    let tm = 0.5 * (ta + tb);
    let m = sample(tm)?;
    Ok(refine(sample, ta, a, tm, m, depth + 1)? + refine(sample, tm, m, tb, b, depth + 1)?)
}

fn merged_breaks(a: &Polyline, b: &Polyline, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = a
        .breakpoints()
        .into_iter()
        .chain(b.breakpoints())
        .chain((0..=n).map(|i| i as f64 / n as f64))
        .collect();
    t.sort_by(f64::total_cmp);
    t.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    t
}

/// `i(δ, γ)` for two paths sharing the vertex-uniform parametrization.
pub fn angle_variation(delta: &Polyline, gamma: &Polyline) -> Result<IndexValue, WindingError> {
    let closed = delta.closed && gamma.closed;
    turning(
        |t| gamma.at(t) - delta.at(t),
        &merged_breaks(delta, gamma, DEFAULT_SAMPLES),
        closed,
    )
}

/// Integer multiple of 2π to subtract from `f(p) - p` in the `x` direction so
/// the loop measures the lift whose fixed points project to those of `f`.
fn deck_shift(f: &MapSpec, p: Point) -> f64 {
    if f.domain.is_periodic() {
        ((f.apply(p).x - p.x) / TWO_PI).round() * TWO_PI
    } else {
        0.0
    }
}

fn loop_index_shifted(f: &MapSpec, lp: &Polyline, shift: f64) -> Result<IndexValue, WindingError> {
    if !lp.closed {
        return Err(WindingError::NotClosed);
    }
    let disp = |p: Point| f.apply(p) - p - Point::new(shift, 0.0);
    for &p in &lp.points {
        let s = disp(p).norm();
        if !(s > SEP_MIN) {
            return Err(WindingError::HitsFixedPoint {
                point: p,
                separation: s,
            });
        }
    }
    turning(
        |t| disp(lp.at(t)),
        &merged_breaks(lp, lp, DEFAULT_SAMPLES),
        true,
    )
    .map_err(|e| match e {
        WindingError::Collision { t, separation } => WindingError::HitsFixedPoint {
            point: lp.at(t),
            separation,
        },
        other => other,
    })
}

/// `i(γ, f ∘ γ)` for a closed loop avoiding `Fix f`.
pub fn loop_index(f: &MapSpec, lp: &Polyline) -> Result<IndexValue, WindingError> {
    loop_index_shifted(f, lp, deck_shift(f, lp.points[0]))
}

/// Index of an isolated interior fixed point, measured on a circle.
pub fn fixed_point_index(f: &MapSpec, z: Point, radius: f64, n_samples: usize) -> Result<IndexValue, WindingError> {
    if !f.domain.is_interior(z, INTERIOR_MARGIN.max(radius)) {
        return Err(WindingError::NotInterior(z));
    }
    let circle = Polyline::circle(z, radius, n_samples.max(8));
    loop_index_shifted(f, &circle, deck_shift(f, z))
}

/// `i(γ, f ∘ γ)` and `i(I ∘ γ̄, f ∘ I ∘ γ̄)`.
///
/// The two agree for maps isotopic to the identity and are opposite for maps
/// isotopic to the reflection.
pub fn mirror_index_check(f: &MapSpec, lp: &Polyline) -> Result<(IndexValue, IndexValue), WindingError> {
    let shift = deck_shift(f, lp.points[0]);
    let direct = loop_index_shifted(f, lp, shift)?;
    let mirror = lp.reflected().reversed();
    let mirrored = loop_index_shifted(f, &mirror, shift)?;
    Ok((direct, mirrored))
}

/// `sign(det(A - I))`, the index of a non-degenerate fixed point.
pub fn linear_index(a: &nalgebra::Matrix2<f64>) -> i64 {
    let m = a - nalgebra::Matrix2::identity();
    m.determinant().signum() as i64
}

/// Angle of `p` in `(-π, π]`, for diagnostics.
pub fn angle(p: Point) -> f64 {
    let a = p.y.atan2(p.x);
    if a == -PI {
        PI
    } else {
        a
    }
}
