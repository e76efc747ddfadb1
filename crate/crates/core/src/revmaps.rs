//! Reversible maps: evaluators, iteration, and numerical validation.
//!
//! A map `f` is reversible with respect to the domain reflection `I` when
//! `f ∘ I = I ∘ f⁻¹`, equivalently when `f ∘ I` is an involution. Maps on the
//! periodic domains are always given in lifted coordinates, so `x` is not
//! reduced modulo 2π by the evaluators.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{DomainError, InvariantDomain, Point};
use crate::expr::ExprError;

pub type PointMap = Arc<dyn Fn(Point) -> Point + Send + Sync>;
pub type JacobianMap = Arc<dyn Fn(Point) -> Matrix2<f64> + Send + Sync>;
pub type CurveMap = Arc<dyn Fn(f64) -> Point + Send + Sync>;

pub const TOL_INVERSE: f64 = 1e-10;
pub const TOL_REVERSIBILITY: f64 = 1e-10;
pub const TOL_AREA: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Central-difference step for Jacobians.
pub const FD_STEP: f64 = 1e-6;
/// Slack used when checking that an orbit stays in a bounded domain.
pub const DOMAIN_SLACK: f64 = 1e-9;

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("unknown map family {0:?}")]
    UnknownFamily(String),
    #[error("unknown parameter {name:?} for family {family}")]
    UnknownParameter { family: String, name: String },
    #[error("parameter {name} = {value} is outside {range}")]
    ParameterRange {
        name: String,
        value: f64,
        range: String,
    },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("family {family} is not defined on the {domain}")]
    UnsupportedDomain {
        family: String,
        domain: &'static str,
    },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("not an involution: residual {residual:e} at {point}")]
    NotInvolution { residual: f64, point: Point },
    #[error("not reversible: residual {residual:e} at {point}")]
    NotReversible { residual: f64, point: Point },
    #[error("orbit left the domain at step {step}: {point}")]
    LeftDomain { step: i64, point: Point },
    #[error("inverse did not converge at {0}")]
    InverseFailed(Point),
}

/// Metadata supplied by the map family; none of it is inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFlags {
    pub isotopic_to_identity: bool,
    pub area_preserving: bool,
    pub orientation_preserving: bool,
}

impl MapFlags {
    pub const SYMPLECTIC: MapFlags = MapFlags {
        isotopic_to_identity: true,
        area_preserving: true,
        orientation_preserving: true,
    };
}

/// One component of a closed-form curve, parametrized over `[0, 1]`.
#[derive(Clone)]
pub struct BaseCurve {
    pub component: usize,
    pub eval: CurveMap,
}

impl BaseCurve {
    pub fn new(component: usize, eval: impl Fn(f64) -> Point + Send + Sync + 'static) -> Self {
        Self {
            component,
            eval: Arc::new(eval),
        }
    }

    #[inline]
    pub fn at(&self, s: f64) -> Point {
        (self.eval)(s)
    }
}

impl fmt::Debug for BaseCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseCurve")
            .field("component", &self.component)
            .field("start", &self.at(0.0))
            .field("end", &self.at(1.0))
            .finish()
    }
}

/// A planar map together with its inverse, domain, and metadata.
#[derive(Clone)]
pub struct MapSpec {
    pub name: String,
    pub domain: InvariantDomain,
    pub flags: MapFlags,
    forward: PointMap,
    inverse: Option<PointMap>,
    jacobian: Option<JacobianMap>,
    base_line: Option<Vec<BaseCurve>>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("flags", &self.flags)
            .field("closed_inverse", &self.inverse.is_some())
            .field("closed_jacobian", &self.jacobian.is_some())
            .field("base_line", &self.base_line.as_ref().map(|b| b.len()))
            .finish()
    }
}

impl MapSpec {
    pub fn new(
        name: impl Into<String>,
        domain: InvariantDomain,
        flags: MapFlags,
        forward: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            flags,
            forward: Arc::new(forward),
            inverse: None,
            jacobian: None,
            base_line: None,
        }
    }

    pub fn with_inverse(mut self, inverse: impl Fn(Point) -> Point + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(Point) -> Matrix2<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn with_base_line(mut self, curves: Vec<BaseCurve>) -> Self {
        self.base_line = Some(curves);
        self
    }

    pub fn with_flags(mut self, flags: MapFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    /// Closed-form parametrization of `Fix(f ∘ I)`, one curve per component.
    pub fn base_line(&self) -> Option<&[BaseCurve]> {
        self.base_line.as_deref()
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        (self.forward)(p)
    }

    /// `f⁻¹(p)`, closed form when available, else damped Newton seeded at `p`.
    pub fn inverse(&self, p: Point) -> Result<Point, MapError> {
        match &self.inverse {
            Some(inv) => Ok(inv(p)),
            None => self.newton_inverse(p),
        }
    }

    fn newton_inverse(&self, p: Point) -> Result<Point, MapError> {
        let scale = 1.0 + p.norm();
        let mut q = p;
        let mut r = self.apply(q) - p;
        for _ in 0..NEWTON_MAX_ITER {
            let rn = r.norm();
            if rn <= NEWTON_TOL * scale {
                return Ok(q);
            }
            let Some(step) = solve2(&self.jacobian(q), r) else {
                break;
            };
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = q - step * lambda;
                let rc = self.apply(cand) - p;
                if rc.norm() < rn {
                    q = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        // rounding can stall slightly above the target
        if r.norm() <= 1e3 * NEWTON_TOL * scale {
            Ok(q)
        } else {
            Err(MapError::InverseFailed(p))
        }
    }

    /// `Df(p)`, closed form when available, else central differences.
    pub fn jacobian(&self, p: Point) -> Matrix2<f64> {
        match &self.jacobian {
            Some(j) => j(p),
            None => fd_jacobian(|q| self.apply(q), p),
        }
    }

    /// `f^n(p)` without domain checks; `n < 0` uses the inverse.
    pub fn apply_n(&self, p: Point, n: i64) -> Result<Point, MapError> {
        let mut q = p;
        if n >= 0 {
            for _ in 0..n {
                q = self.apply(q);
            }
        } else {
            for _ in 0..(-n) {
                q = self.inverse(q)?;
            }
        }
        Ok(q)
    }

    /// `f^n(p)`; bounded domains reject orbits that leave the point set.
    pub fn iterate(&self, p: Point, n: i64) -> Result<Point, MapError> {
        Ok(*self.orbit(p, n)?.last().expect("orbit is never empty"))
    }

    /// `p, f(p), ..., f^n(p)` (or the backward orbit for negative `n`).
    pub fn orbit(&self, p: Point, n: i64) -> Result<Vec<Point>, MapError> {
        let check = |step: i64, q: Point| -> Result<(), MapError> {
            if !q.is_finite() || (self.domain.is_bounded() && !self.domain.contains_within(q, DOMAIN_SLACK)) {
                Err(MapError::LeftDomain { step, point: q })
            } else {
                Ok(())
            }
        };
        check(0, p)?;
        let mut out = Vec::with_capacity(n.unsigned_abs() as usize + 1);
        out.push(p);
        let mut q = p;
        for i in 1..=n.abs() {
            q = if n > 0 { self.apply(q) } else { self.inverse(q)? };
            let step = if n > 0 { i } else { -i };
            check(step, q)?;
            out.push(q);
        }
        Ok(out)
    }

    /// The iterate `f^k` as a map in its own right.
    pub fn power(&self, k: i64) -> MapSpec {
        let f = self.clone();
        let g = self.clone();
        let flags = MapFlags {
            isotopic_to_identity: self.flags.isotopic_to_identity || k % 2 == 0,
            area_preserving: self.flags.area_preserving,
            orientation_preserving: self.flags.orientation_preserving || k % 2 == 0,
        };
        MapSpec::new(format!("({})^{}", self.name, k), self.domain, flags, move |p| {
            // the inverse branch only fails when Newton fails; fall back to NaN
            f.apply_n(p, k).unwrap_or(Point::new(f64::NAN, f64::NAN))
        })
        .with_inverse(move |p| g.apply_n(p, -k).unwrap_or(Point::new(f64::NAN, f64::NAN)))
    }

    /// `f ∘ I`, an involution whenever `f` is reversible.
    pub fn reversor(&self) -> InvolutionSpec {
        let f = self.clone();
        let dom = self.domain;
        InvolutionSpec::new(
            format!("({}) o I", self.name),
            self.domain,
            self.flags.orientation_preserving,
            move |p| f.apply(dom.reflect_lift(p)),
        )
    }
}

/// An involution `J` on a domain.
#[derive(Clone)]
pub struct InvolutionSpec {
    pub name: String,
    pub domain: InvariantDomain,
    pub orientation_reversing: bool,
    eval: PointMap,
    fixed_set: Option<Vec<BaseCurve>>,
}

impl fmt::Debug for InvolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvolutionSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("orientation_reversing", &self.orientation_reversing)
            .finish()
    }
}

impl InvolutionSpec {
    pub fn new(
        name: impl Into<String>,
        domain: InvariantDomain,
        orientation_reversing: bool,
        eval: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            orientation_reversing,
            eval: Arc::new(eval),
            fixed_set: None,
        }
    }

    /// Closed-form parametrization of `Fix J`.
    pub fn with_fixed_set(mut self, curves: Vec<BaseCurve>) -> Self {
        self.fixed_set = Some(curves);
        self
    }

    pub fn fixed_set(&self) -> Option<&[BaseCurve]> {
        self.fixed_set.as_deref()
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        (self.eval)(p)
    }
}

/// Outcome of a sampled validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_residual: f64,
    pub n_samples: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Point,
}

impl ValidationReport {
    /// Sequential reduction over an ordered residual list keeps the result
    /// independent of the worker count.
    fn from_residuals(samples: &[Point], residuals: &[f64], tolerance: f64) -> Self {
        let mut worst = 0usize;
        let mut max = 0.0f64;
        for (i, &r) in residuals.iter().enumerate() {
            // NaN counts as failure
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if r > max {
                max = r;
                worst = i;
            }
        }
        Self {
            max_residual: max,
            n_samples: samples.len(),
            tolerance,
            pass: max <= tolerance,
            worst_point: samples.get(worst).copied().unwrap_or_default(),
        }
    }
}

fn sampled(
    domain: &InvariantDomain,
    n_samples: usize,
    tolerance: f64,
    residual: impl Fn(Point) -> f64 + Sync,
) -> ValidationReport {
    let samples = domain.halton_samples(n_samples);
    let residuals: Vec<f64> = samples.par_iter().map(|&p| residual(p)).collect();
    ValidationReport::from_residuals(&samples, &residuals, tolerance)
}

/// `max ‖f(I p) − I(f⁻¹ p)‖` over Halton samples.
pub fn validate_reversibility(f: &MapSpec, n_samples: usize, tol: f64) -> ValidationReport {
    let d = f.domain;
    sampled(&d, n_samples, tol, |p| match f.inverse(p) {
        Ok(q) => d.distance(f.apply(d.reflect_lift(p)), d.reflect_lift(q)),
        Err(_) => f64::INFINITY,
    })
}

/// `max ‖J(J p) − p‖` over Halton samples.
pub fn validate_involution(j: &InvolutionSpec, n_samples: usize, tol: f64) -> ValidationReport {
    let d = j.domain;
    sampled(&d, n_samples, tol, |p| d.distance(j.apply(j.apply(p)), p))
}

/// `max ||det Df(p)| − 1|` over Halton samples; orientation-reversing maps
/// preserve area with determinant `-1`.
pub fn validate_area(f: &MapSpec, n_samples: usize, tol: f64) -> ValidationReport {
    sampled(&f.domain, n_samples, tol, |p| (f.jacobian(p).determinant().abs() - 1.0).abs())
}

/// `max ‖f(f⁻¹ p) − p‖` over Halton samples.
pub fn validate_inverse(f: &MapSpec, n_samples: usize, tol: f64) -> ValidationReport {
    let d = f.domain;
    sampled(&d, n_samples, tol, |p| match f.inverse(p) {
        Ok(q) => d.distance(f.apply(q), p),
        Err(_) => f64::INFINITY,
    })
}

/// `f := J ∘ I` with `f⁻¹ = I ∘ J`.
///
/// Orientation and isotopy flags follow from `J`; area preservation is
/// measured. The base line is `Fix J` when `J` carries a closed form.
pub fn build_from_involution(j: &InvolutionSpec) -> Result<MapSpec, MapError> {
    let report = validate_involution(j, DEFAULT_SAMPLES, TOL_REVERSIBILITY);
    if !report.pass {
        return Err(MapError::NotInvolution {
            residual: report.max_residual,
            point: report.worst_point,
        });
    }
    let d = j.domain;
    let (jf, ji) = (j.clone(), j.clone());
    let orientation_preserving = j.orientation_reversing;
    let mut f = MapSpec::new(
        format!("({}) o I", j.name),
        d,
        MapFlags {
            isotopic_to_identity: orientation_preserving,
            area_preserving: false,
            orientation_preserving,
        },
        move |p| jf.apply(d.reflect_lift(p)),
    )
    .with_inverse(move |p| d.reflect_lift(ji.apply(p)));
    if let Some(fix) = j.fixed_set() {
        f = f.with_base_line(fix.to_vec());
    }
    f.flags.area_preserving = validate_area(&f, DEFAULT_SAMPLES, TOL_AREA).pass;
    let rev = validate_reversibility(&f, DEFAULT_SAMPLES, TOL_REVERSIBILITY);
    if !rev.pass {
        return Err(MapError::NotReversible {
            residual: rev.max_residual,
            point: rev.worst_point,
        });
    }
    Ok(f)
}

/// Central-difference Jacobian with step [`FD_STEP`].
pub fn fd_jacobian(f: impl Fn(Point) -> Point, p: Point) -> Matrix2<f64> {
    let h = FD_STEP;
    let dx = (f(Point::new(p.x + h, p.y)) - f(Point::new(p.x - h, p.y))) * (0.5 / h);
    let dy = (f(Point::new(p.x, p.y + h)) - f(Point::new(p.x, p.y - h))) * (0.5 / h);
    Matrix2::new(dx.x, dy.x, dx.y, dy.y)
}

/// Solves `A v = r`; `None` when `A` is numerically singular.
pub fn solve2(a: &Matrix2<f64>, r: Point) -> Option<Point> {
    let det = a.determinant();
    let scale = a.abs().max().max(1e-300);
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    let v = a.try_inverse()? * Vector2::new(r.x, r.y);
    Some(Point::new(v.x, v.y))
}
