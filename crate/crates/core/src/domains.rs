//! Invariant planar domains, their reflection, and the strip/annulus covering.
//!
//! Every domain uses planar coordinates `(x, y)` in which the reflection acts
//! as `(x, y) -> (-x, y)`. For the annulus kinds `x` is an angle measured from
//! the positive vertical axis and `y` is the radius, so the reflection is
//! `x -> -x (mod 2π)` and the two fixed-locus components sit at `x = 0` and
//! `x = π`. The cylinder is `R/2πZ` times a closed height band.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TWO_PI: f64 = 2.0 * PI;

/// Default margin for "interior point" queries.
pub const INTERIOR_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("point {0} is not finite")]
    NotFinite(Point),
    #[error("point {point} lies outside the {kind} domain")]
    Outside { point: Point, kind: &'static str },
    #[error("invalid domain parameters: {0}")]
    InvalidParameters(String),
}

/// Axis-aligned window used for sampling and plotting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InvariantDomain {
    /// `1 <= r <= 2` in (angle, radius) coordinates.
    ClosedAnnulus,
    /// `1 < r < 2`.
    OpenAnnulus,
    /// `R x [0, 1]`.
    Strip,
    /// `|z| <= 1`.
    ClosedDisk,
    /// `|z| < 1`.
    OpenDisk,
    /// `R/2πZ x [y_min, y_max]`.
    Cylinder { y_min: f64, y_max: f64 },
    /// The whole plane; `extent` only bounds sampling and plotting.
    Plane { extent: f64 },
}

/// One connected component of the reflection's fixed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusSegment {
    pub component_id: usize,
    pub start: Point,
    pub end: Point,
    pub start_open: bool,
    pub end_open: bool,
}

impl LocusSegment {
    pub fn at(&self, t: f64) -> Point {
        self.start.lerp(self.end, t)
    }
}

/// Reduce an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Reduce an angle difference into `(-π, π]`.
#[inline]
pub fn wrap_difference(dx: f64) -> f64 {
    let r = (dx + PI).rem_euclid(TWO_PI) - PI;
    if r <= -PI {
        r + TWO_PI
    } else {
        r
    }
}

impl InvariantDomain {
    pub fn cylinder(y_min: f64, y_max: f64) -> Result<Self, DomainError> {
        if !(y_min.is_finite() && y_max.is_finite() && y_min < y_max) {
            return Err(DomainError::InvalidParameters(format!(
                "cylinder band [{y_min}, {y_max}] must be finite and non-empty"
            )));
        }
        Ok(Self::Cylinder { y_min, y_max })
    }

    pub fn plane(extent: f64) -> Result<Self, DomainError> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(DomainError::InvalidParameters(format!(
                "plane extent {extent} must be positive"
            )));
        }
        Ok(Self::Plane { extent })
    }

    /// Re-checks parameters after deserialization.
    pub fn validate(&self) -> Result<(), DomainError> {
        match *self {
            Self::Cylinder { y_min, y_max } => Self::cylinder(y_min, y_max).map(|_| ()),
            Self::Plane { extent } => Self::plane(extent).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ClosedAnnulus => "closed annulus",
            Self::OpenAnnulus => "open annulus",
            Self::Strip => "strip",
            Self::ClosedDisk => "closed disk",
            Self::OpenDisk => "open disk",
            Self::Cylinder { .. } => "cylinder",
            Self::Plane { .. } => "plane",
        }
    }

    /// True when `x` is an angle defined modulo 2π.
    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            Self::ClosedAnnulus | Self::OpenAnnulus | Self::Cylinder { .. }
        )
    }

    /// Kinds whose orbits must stay inside the point set.
    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            Self::ClosedAnnulus
                | Self::OpenAnnulus
                | Self::Strip
                | Self::ClosedDisk
                | Self::OpenDisk
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        if !p.is_finite() {
            return false;
        }
        match *self {
            Self::ClosedAnnulus => (1.0..=2.0).contains(&p.y),
            Self::OpenAnnulus => p.y > 1.0 && p.y < 2.0,
            Self::Strip => (0.0..=1.0).contains(&p.y),
            Self::ClosedDisk => p.x * p.x + p.y * p.y <= 1.0,
            Self::OpenDisk => p.x * p.x + p.y * p.y < 1.0,
            Self::Cylinder { y_min, y_max } => p.y >= y_min && p.y <= y_max,
            Self::Plane { .. } => true,
        }
    }

    /// Membership with slack `tol`, used to accept numerically refined points.
    pub fn contains_within(&self, p: Point, tol: f64) -> bool {
        if !p.is_finite() {
            return false;
        }
        match *self {
            Self::ClosedAnnulus | Self::OpenAnnulus => p.y >= 1.0 - tol && p.y <= 2.0 + tol,
            Self::Strip => p.y >= -tol && p.y <= 1.0 + tol,
            Self::ClosedDisk | Self::OpenDisk => p.norm() <= 1.0 + tol,
            Self::Cylinder { y_min, y_max } => p.y >= y_min - tol && p.y <= y_max + tol,
            Self::Plane { .. } => true,
        }
    }

    /// Interior membership: at least `margin` away from the boundary.
    pub fn is_interior(&self, p: Point, margin: f64) -> bool {
        if !p.is_finite() {
            return false;
        }
        match *self {
            Self::ClosedAnnulus | Self::OpenAnnulus => p.y > 1.0 + margin && p.y < 2.0 - margin,
            Self::Strip => p.y > margin && p.y < 1.0 - margin,
            Self::ClosedDisk | Self::OpenDisk => p.norm() < 1.0 - margin,
            Self::Cylinder { y_min, y_max } => p.y > y_min + margin && p.y < y_max - margin,
            Self::Plane { .. } => true,
        }
    }

    /// The reflection `I_Ω`. Angles are returned in `[0, 2π)`.
    pub fn reflect(&self, p: Point) -> Result<Point, DomainError> {
        if !p.is_finite() {
            return Err(DomainError::NotFinite(p));
        }
        if !self.contains(p) {
            return Err(DomainError::Outside {
                point: p,
                kind: self.name(),
            });
        }
        Ok(self.canonical(self.reflect_lift(p)))
    }

    /// `(x, y) -> (-x, y)` without reduction or membership checks; keeps
    /// reflected paths continuous in the covering.
    #[inline]
    pub fn reflect_lift(&self, p: Point) -> Point {
        Point::new(-p.x, p.y)
    }

    /// Representative of `p` with the angle reduced into `[0, 2π)`.
    #[inline]
    pub fn canonical(&self, p: Point) -> Point {
        if self.is_periodic() {
            Point::new(wrap_angle(p.x), p.y)
        } else {
            p
        }
    }

    /// Shortest displacement `to - from` in the domain's metric.
    #[inline]
    pub fn displacement(&self, from: Point, to: Point) -> Point {
        let d = to - from;
        if self.is_periodic() {
            Point::new(wrap_difference(d.x), d.y)
        } else {
            d
        }
    }

    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.displacement(a, b).norm()
    }

    pub fn fixed_locus(&self) -> Vec<LocusSegment> {
        let vertical = |id: usize, x: f64, y0: f64, y1: f64, open: bool| LocusSegment {
            component_id: id,
            start: Point::new(x, y0),
            end: Point::new(x, y1),
            start_open: open,
            end_open: open,
        };
        match *self {
            Self::ClosedAnnulus => vec![
                vertical(0, 0.0, 1.0, 2.0, false),
                vertical(1, PI, 1.0, 2.0, false),
            ],
            Self::OpenAnnulus => vec![
                vertical(0, 0.0, 1.0, 2.0, true),
                vertical(1, PI, 1.0, 2.0, true),
            ],
            Self::Strip => vec![vertical(0, 0.0, 0.0, 1.0, false)],
            Self::ClosedDisk => vec![vertical(0, 0.0, -1.0, 1.0, false)],
            Self::OpenDisk => vec![vertical(0, 0.0, -1.0, 1.0, true)],
            Self::Cylinder { y_min, y_max } => vec![
                vertical(0, 0.0, y_min, y_max, false),
                vertical(1, PI, y_min, y_max, false),
            ],
            Self::Plane { extent } => vec![vertical(0, 0.0, -extent, extent, true)],
        }
    }

    /// Bounding window of the (clipped) point set in internal coordinates.
    pub fn window(&self) -> Window {
        match *self {
            Self::ClosedAnnulus | Self::OpenAnnulus => Window {
                x_min: 0.0,
                x_max: TWO_PI,
                y_min: 1.0,
                y_max: 2.0,
            },
            Self::Strip => Window {
                x_min: -PI,
                x_max: PI,
                y_min: 0.0,
                y_max: 1.0,
            },
            Self::ClosedDisk | Self::OpenDisk => Window {
                x_min: -1.0,
                x_max: 1.0,
                y_min: -1.0,
                y_max: 1.0,
            },
            Self::Cylinder { y_min, y_max } => Window {
                x_min: 0.0,
                x_max: TWO_PI,
                y_min,
                y_max,
            },
            Self::Plane { extent } => Window {
                x_min: -extent,
                x_max: extent,
                y_min: -extent,
                y_max: extent,
            },
        }
    }

    pub fn diameter(&self) -> f64 {
        self.window().diagonal()
    }

    /// Euclidean picture of a point; only the annuli differ from the identity.
    pub fn to_euclidean(&self, p: Point) -> Point {
        match self {
            Self::ClosedAnnulus | Self::OpenAnnulus => {
                Point::new(p.y * p.x.sin(), p.y * p.x.cos())
            }
            _ => p,
        }
    }

    pub fn from_euclidean(&self, q: Point) -> Point {
        match self {
            Self::ClosedAnnulus | Self::OpenAnnulus => {
                Point::new(wrap_angle(q.x.atan2(q.y)), q.norm())
            }
            _ => q,
        }
    }

    /// Deterministic low-discrepancy samples inside the domain.
    pub fn halton_samples(&self, n: usize) -> Vec<Point> {
        let w = self.window();
        (1..=n)
            .map(|i| {
                let u = radical_inverse(i as u64, 2);
                let v = radical_inverse(i as u64, 3);
                match *self {
                    Self::ClosedDisk | Self::OpenDisk => {
                        // area-uniform, strictly inside the unit disk
                        let r = 0.999_999 * u.sqrt();
                        let th = TWO_PI * v;
                        Point::new(r * th.cos(), r * th.sin())
                    }
                    Self::OpenAnnulus => Point::new(TWO_PI * u, 1.0 + 1e-9 + v * (1.0 - 2e-9)),
                    _ => Point::new(w.x_min + u * w.width(), w.y_min + v * w.height()),
                }
            })
            .collect()
    }
}

/// Van der Corput radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Covering `R x [a, b] -> R/2πZ x [a + offset, b + offset]` by `x -> x mod 2π`.
///
/// The annulus covering uses `offset = 1` so the strip `R x [0, 1]` covers
/// radii `[1, 2]`; the cylinder covering has `offset = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covering {
    pub radial_offset: f64,
}

impl Covering {
    pub const fn annulus() -> Self {
        Self { radial_offset: 1.0 }
    }

    pub const fn cylinder() -> Self {
        Self { radial_offset: 0.0 }
    }

    /// Lift into the fundamental strip `[0, 2π) x R`.
    pub fn lift_point(&self, p: Point) -> Point {
        Point::new(wrap_angle(p.x), p.y - self.radial_offset)
    }

    pub fn project_point(&self, p: Point) -> Point {
        Point::new(wrap_angle(p.x), p.y + self.radial_offset)
    }

    /// The lift `(x, y) -> (-x, y)` of the reflection; its fixed line covers
    /// the component at angle 0.
    pub fn lift_reflection(p: Point) -> Point {
        Point::new(-p.x, p.y)
    }

    /// The translated lift `(x, y) -> (2π - x, y)`, fixing the line `x = π`.
    pub fn lift_reflection_translate(p: Point) -> Point {
        Point::new(TWO_PI - p.x, p.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_domains() -> Vec<InvariantDomain> {
        vec![
            InvariantDomain::ClosedAnnulus,
            InvariantDomain::OpenAnnulus,
            InvariantDomain::Strip,
            InvariantDomain::ClosedDisk,
            InvariantDomain::OpenDisk,
            InvariantDomain::cylinder(-1.0, 2.0).unwrap(),
            InvariantDomain::plane(3.0).unwrap(),
        ]
    }

    #[test]
    fn membership_examples() {
        let on_inner = InvariantDomain::ClosedAnnulus.from_euclidean(Point::new(0.6, 0.8));
        assert!((on_inner.y - 1.0).abs() < 1e-15);
        let unit = Point::new(0.3, 1.0);
        assert!(InvariantDomain::ClosedAnnulus.contains(unit));
        assert!(!InvariantDomain::OpenAnnulus.contains(unit));
        assert!(InvariantDomain::Strip.contains(Point::new(5.3, 0.5)));
        assert!(!InvariantDomain::Strip.contains(Point::new(5.3, 1.5)));
        assert!(InvariantDomain::ClosedDisk.contains(Point::new(0.0, 1.0)));
        assert!(!InvariantDomain::OpenDisk.contains(Point::new(0.0, 1.0)));
        assert!(!InvariantDomain::Strip.contains(Point::new(f64::NAN, 0.5)));
    }

    #[test]
    fn interior_flag() {
        let d = InvariantDomain::ClosedDisk;
        assert!(d.is_interior(Point::new(0.0, 0.5), INTERIOR_MARGIN));
        assert!(!d.is_interior(Point::new(0.0, 1.0), INTERIOR_MARGIN));
        assert!(!InvariantDomain::Strip.is_interior(Point::new(1.0, 0.0), INTERIOR_MARGIN));
    }

    #[test]
    fn reflect_examples() {
        let s = InvariantDomain::Strip;
        assert_eq!(s.reflect(Point::new(1.2, 0.3)).unwrap(), Point::new(-1.2, 0.3));
        for d in all_domains() {
            let p = Point::new(0.0, if d.is_periodic() { 1.5 } else { 0.5 });
            assert_eq!(d.reflect(p).unwrap(), p);
        }
        let c = InvariantDomain::cylinder(0.0, 1.0).unwrap();
        let q = c.reflect(Point::new(PI / 2.0, 0.3)).unwrap();
        assert!((q.x - 3.0 * PI / 2.0).abs() < 1e-15);
        assert!((c.reflect(q).unwrap().x - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn reflect_rejects_outside_points() {
        let err = InvariantDomain::ClosedDisk.reflect(Point::new(2.0, 0.0));
        assert!(matches!(err, Err(DomainError::Outside { .. })));
    }

    #[test]
    fn reflect_is_involutive_and_preserves_domain() {
        for d in all_domains() {
            for p in d.halton_samples(500) {
                let q = d.reflect(p).unwrap();
                assert!(d.contains(q), "{d:?} {p}");
                let back = d.reflect(q).unwrap();
                assert!(d.distance(back, p) <= 4.0 * f64::EPSILON * (1.0 + p.norm()));
            }
        }
    }

    #[test]
    fn fixed_locus_topology() {
        let annulus = InvariantDomain::ClosedAnnulus.fixed_locus();
        assert_eq!(annulus.len(), 2);
        let e0 = (
            InvariantDomain::ClosedAnnulus.to_euclidean(annulus[0].start),
            InvariantDomain::ClosedAnnulus.to_euclidean(annulus[0].end),
        );
        let e1 = (
            InvariantDomain::ClosedAnnulus.to_euclidean(annulus[1].start),
            InvariantDomain::ClosedAnnulus.to_euclidean(annulus[1].end),
        );
        // Y_+ = {0} x [1, 2], Y_- = {0} x [-2, -1]
        assert!(e0.0.x.abs() < 1e-15 && (e0.0.y - 1.0).abs() < 1e-15 && (e0.1.y - 2.0).abs() < 1e-15);
        assert!(e1.0.x.abs() < 1e-15 && (e1.0.y + 1.0).abs() < 1e-15 && (e1.1.y + 2.0).abs() < 1e-15);

        let disk = InvariantDomain::ClosedDisk.fixed_locus();
        assert_eq!(disk.len(), 1);
        assert_eq!(disk[0].start, Point::new(0.0, -1.0));
        assert_eq!(disk[0].end, Point::new(0.0, 1.0));

        let cyl = InvariantDomain::cylinder(0.0, 1.0).unwrap().fixed_locus();
        assert_eq!(cyl.len(), 2);
        assert_eq!(cyl[0].start.x, 0.0);
        assert_eq!(cyl[1].start.x, PI);
        assert_eq!(InvariantDomain::Strip.fixed_locus().len(), 1);
    }

    #[test]
    fn locus_points_are_fixed_and_others_move() {
        for d in all_domains() {
            for seg in d.fixed_locus() {
                for k in 0..=20 {
                    let p = seg.at(k as f64 / 20.0);
                    if d.contains(p) {
                        let q = d.reflect(p).unwrap();
                        assert_eq!(d.distance(p, q), 0.0, "{d:?} {p}");
                    }
                }
            }
            let moved = d
                .halton_samples(200)
                .into_iter()
                .filter(|p| p.x.abs() > 1e-3 && (p.x - PI).abs() > 1e-3)
                .all(|p| d.distance(p, d.reflect(p).unwrap()) > 0.0);
            assert!(moved, "{d:?}");
        }
    }

    #[test]
    fn covering_examples() {
        let cov = Covering::cylinder();
        let p = cov.project_point(Point::new(TWO_PI + 0.1, 0.5));
        assert!((p.x - 0.1).abs() < 1e-14 && p.y == 0.5);

        // the annulus component at angle π lifts to the fixed line of I_S'
        let ann = Covering::annulus();
        let comp = InvariantDomain::ClosedAnnulus.fixed_locus()[1];
        for k in 0..=10 {
            let lifted = ann.lift_point(comp.at(k as f64 / 10.0));
            assert_eq!(lifted.x, PI);
            assert_eq!(Covering::lift_reflection_translate(lifted), lifted);
        }
    }

    #[test]
    fn covering_section_and_equivariance() {
        let ann = Covering::annulus();
        let dom = InvariantDomain::ClosedAnnulus;
        for p in dom.halton_samples(100) {
            let back = ann.project_point(ann.lift_point(p));
            assert!(dom.distance(back, p) < 1e-14);
            let s = ann.lift_point(p);
            let lhs = ann.project_point(Covering::lift_reflection(s));
            let rhs = dom.reflect(ann.project_point(s)).unwrap();
            assert!(dom.distance(lhs, rhs) < 1e-14);
        }
    }

    #[test]
    fn wrap_helpers() {
        assert!((wrap_difference(TWO_PI - 0.1) + 0.1).abs() < 1e-15);
        assert_eq!(wrap_difference(PI), PI);
        assert_eq!(wrap_angle(-0.0), 0.0);
        assert!(wrap_angle(-1e-18) < TWO_PI);
    }
}
