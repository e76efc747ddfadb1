//! Builtin reversible map families and the name-based constructor used by
//! configuration files.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::domains::{InvariantDomain, Point, TWO_PI};
use crate::expr::Expr;
use crate::revmaps::{
    build_from_involution, fd_jacobian, BaseCurve, InvolutionSpec, MapError, MapFlags, MapSpec,
};

/// A real function of one variable, e.g. the twist profile `a(y)`.
#[derive(Clone)]
pub struct Profile {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.label)
    }
}

impl Profile {
    /// `a(y) = slope * (y - shift)`.
    pub fn linear(slope: f64, shift: f64) -> Self {
        Self {
            label: format!("{slope}*(y-{shift})"),
            f: Arc::new(move |y| slope * (y - shift)),
            df: Arc::new(move |_| slope),
        }
    }

    /// Parses an expression in `y`; the derivative is a central difference.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let e = Expr::parse(text)?;
        if e.uses_x() {
            return Err(MapError::InvalidParameter {
                name: "a".into(),
                reason: "profile may depend on y only".into(),
            });
        }
        let e2 = e.clone();
        Ok(Self {
            label: text.to_string(),
            f: Arc::new(move |y| e.eval(0.0, y)),
            df: Arc::new(move |y| {
                let h = 1e-6 * (1.0 + y.abs());
                (e2.eval(0.0, y + h) - e2.eval(0.0, y - h)) / (2.0 * h)
            }),
        })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    #[inline]
    pub fn derivative(&self, y: f64) -> f64 {
        (self.df)(y)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

fn rotate(p: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

/// Vertical band of a domain, for families defined by `y`-dependent shears.
fn band(domain: &InvariantDomain, family: &str) -> Result<(f64, f64), MapError> {
    match *domain {
        InvariantDomain::Strip => Ok((0.0, 1.0)),
        InvariantDomain::ClosedAnnulus | InvariantDomain::OpenAnnulus => Ok((1.0, 2.0)),
        InvariantDomain::Cylinder { y_min, y_max } => Ok((y_min, y_max)),
        _ => Err(MapError::UnsupportedDomain {
            family: family.into(),
            domain: domain.name(),
        }),
    }
}

/// `f(x, y) = (x + a(y), y)`.
pub fn twist(a: Profile, domain: InvariantDomain) -> Result<MapSpec, MapError> {
    let (y0, y1) = band(&domain, "twist")?;
    let (af, ai, aj) = (a.clone(), a.clone(), a.clone());
    let components = if domain.is_periodic() { 2 } else { 1 };
    let curves = (0..components)
        .map(|c| {
            let a = a.clone();
            BaseCurve::new(c, move |s| {
                let y = y0 + s * (y1 - y0);
                Point::new(0.5 * a.eval(y) + c as f64 * PI, y)
            })
        })
        .collect();
    Ok(MapSpec::new(
        format!("twist(a = {})", a.label()),
        domain,
        MapFlags::SYMPLECTIC,
        move |p| Point::new(p.x + af.eval(p.y), p.y),
    )
    .with_inverse(move |p| Point::new(p.x - ai.eval(p.y), p.y))
    .with_jacobian(move |p| Matrix2::new(1.0, aj.derivative(p.y), 0.0, 1.0))
    .with_base_line(curves))
}

/// Rotation of the closed unit disk by `alpha`.
pub fn rigid_disk_rotation(alpha: f64) -> MapSpec {
    let (s, c) = alpha.sin_cos();
    let dir = Point::new(-(0.5 * alpha).sin(), (0.5 * alpha).cos());
    MapSpec::new(
        format!("rigid_disk_rotation(alpha = {alpha})"),
        InvariantDomain::ClosedDisk,
        MapFlags::SYMPLECTIC,
        move |p| rotate(p, alpha),
    )
    .with_inverse(move |p| rotate(p, -alpha))
    .with_jacobian(move |_| Matrix2::new(c, -s, s, c))
    .with_base_line(vec![BaseCurve::new(0, move |t| dir * (2.0 * t - 1.0))])
}

/// `(θ, r) -> (θ + alpha, r)` on the closed annulus.
pub fn rigid_annulus_rotation(alpha: f64) -> MapSpec {
    let curves = (0..2)
        .map(|c| BaseCurve::new(c, move |s| Point::new(0.5 * alpha + c as f64 * PI, 1.0 + s)))
        .collect();
    MapSpec::new(
        format!("rigid_annulus_rotation(alpha = {alpha})"),
        InvariantDomain::ClosedAnnulus,
        MapFlags::SYMPLECTIC,
        move |p| Point::new(p.x + alpha, p.y),
    )
    .with_inverse(move |p| Point::new(p.x - alpha, p.y))
    .with_jacobian(|_| Matrix2::identity())
    .with_base_line(curves)
}

/// The identity on `domain`; every symmetry line coincides with `Fix I`.
pub fn identity(domain: InvariantDomain) -> MapSpec {
    let curves = domain
        .fixed_locus()
        .into_iter()
        .map(|seg| BaseCurve::new(seg.component_id, move |s| seg.at(s)))
        .collect();
    MapSpec::new("identity", domain, MapFlags::SYMPLECTIC, |p| p)
        .with_inverse(|p| p)
        .with_jacobian(|_| Matrix2::identity())
        .with_base_line(curves)
}

/// `p -> A p`; reversible only for suitable `A`, used for index checks.
pub fn linear(a: Matrix2<f64>, domain: InvariantDomain) -> MapSpec {
    let det = a.determinant();
    let inv = a.try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
    let apply = |m: Matrix2<f64>, p: Point| Point::new(m[(0, 0)] * p.x + m[(0, 1)] * p.y, m[(1, 0)] * p.x + m[(1, 1)] * p.y);
    MapSpec::new(
        format!(
            "linear([[{}, {}], [{}, {}]])",
            a[(0, 0)],
            a[(0, 1)],
            a[(1, 0)],
            a[(1, 1)]
        ),
        domain,
        MapFlags {
            isotopic_to_identity: det > 0.0,
            area_preserving: (det - 1.0).abs() < 1e-12,
            orientation_preserving: det > 0.0,
        },
        move |p| apply(a, p),
    )
    .with_inverse(move |p| apply(inv, p))
    .with_jacobian(move |_| a)
}

pub const STANDARD_K_MAX: f64 = 3.5;

/// `g = h ∘ f_K ∘ h⁻¹` on a cylinder band, where
/// `f_K(x, y) = (x + y + K sin x, y + K sin x)` and `h(x, y) = (x, y + (K/2) sin x)`.
///
/// `h` carries the classical reversor `(x, y) -> (-x, y + K sin x)` to `I`, so
/// `g` is reversible with respect to `I`.
pub fn normalized_standard(k: f64, y_min: f64, y_max: f64) -> Result<MapSpec, MapError> {
    if !(0.0..=STANDARD_K_MAX).contains(&k) {
        return Err(MapError::ParameterRange {
            name: "k".into(),
            value: k,
            range: format!("[0, {STANDARD_K_MAX}]"),
        });
    }
    let domain = InvariantDomain::cylinder(y_min, y_max)?;
    let half = 0.5 * k;
    let forward = move |p: Point| {
        // h⁻¹, then f_K, then h
        let y = p.y - half * p.x.sin();
        let yn = y + k * p.x.sin();
        let xn = p.x + yn;
        Point::new(xn, yn + half * xn.sin())
    };
    let inverse = move |p: Point| {
        let yn = p.y - half * p.x.sin();
        let x = p.x - yn;
        let y = yn - k * x.sin();
        Point::new(x, y + half * x.sin())
    };
    let jacobian = move |p: Point| {
        let dh_inv = Matrix2::new(1.0, 0.0, -half * p.x.cos(), 1.0);
        let y = p.y - half * p.x.sin();
        let q = Point::new(p.x, y);
        let cq = k * q.x.cos();
        let df = Matrix2::new(1.0 + cq, 1.0, cq, 1.0);
        let xn = q.x + y + k * q.x.sin();
        let dh = Matrix2::new(1.0, 0.0, half * xn.cos(), 1.0);
        dh * df * dh_inv
    };
    // Fix(g ∘ I) = { (u/2 + nπ, u + (K/2) sin(u/2 + nπ)) }, with the range of u
    // chosen so the height stays in the band (monotone since K < 4)
    let height = move |u: f64, n: usize| u + half * (0.5 * u + n as f64 * PI).sin();
    let solve = move |target: f64, n: usize| {
        let (mut lo, mut hi) = (target - half - 1.0, target + half + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if height(mid, n) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let curves = (0..2)
        .map(|n| {
            let (u0, u1) = (solve(y_min, n), solve(y_max, n));
            BaseCurve::new(n, move |s| {
                let u = u0 + s * (u1 - u0);
                let x = 0.5 * u + n as f64 * PI;
                let y = if s == 0.0 {
                    y_min
                } else if s == 1.0 {
                    y_max
                } else {
                    height(u, n)
                };
                Point::new(x, y)
            })
        })
        .collect();
    Ok(MapSpec::new(
        format!("normalized_standard(k = {k})"),
        domain,
        MapFlags::SYMPLECTIC,
        forward,
    )
    .with_inverse(inverse)
    .with_jacobian(jacobian)
    .with_base_line(curves))
}

pub const WAVY_C_MAX: f64 = 0.45;

/// Twist `(x + a(y), y)` conjugated by the `I`-equivariant diffeomorphism
/// `h(x, y) = (x, y + c (1 - cos x) sin(πy) / π)` on the cylinder `[0, 1]`.
/// The bump vanishes on the boundary circles; the result is not area preserving.
pub fn wavy_twist(a: Profile, c: f64) -> Result<MapSpec, MapError> {
    if !(0.0..=WAVY_C_MAX).contains(&c) {
        return Err(MapError::ParameterRange {
            name: "c".into(),
            value: c,
            range: format!("[0, {WAVY_C_MAX}]"),
        });
    }
    let h = move |p: Point| Point::new(p.x, p.y + c * (1.0 - p.x.cos()) * (PI * p.y).sin() / PI);
    let h_inv = move |p: Point| {
        // y + w(x) sin(πy)/π = p.y is strictly increasing in y since c < 1/2
        let w = c * (1.0 - p.x.cos());
        let mut y = p.y;
        for _ in 0..60 {
            let g = y + w * (PI * y).sin() / PI - p.y;
            let dg = 1.0 + w * (PI * y).cos();
            let step = g / dg;
            y -= step;
            if step.abs() < 1e-16 * (1.0 + y.abs()) {
                break;
            }
        }
        Point::new(p.x, y)
    };
    let (af, ai) = (a.clone(), a.clone());
    let forward = move |p: Point| {
        let q = h_inv(p);
        h(Point::new(q.x + af.eval(q.y), q.y))
    };
    let inverse = move |p: Point| {
        let q = h_inv(p);
        h(Point::new(q.x - ai.eval(q.y), q.y))
    };
    let curves = (0..2)
        .map(|n| {
            let a = a.clone();
            BaseCurve::new(n, move |s| h(Point::new(0.5 * a.eval(s) + n as f64 * PI, s)))
        })
        .collect();
    Ok(MapSpec::new(
        format!("wavy_twist(a = {}, c = {c})", a.label()),
        InvariantDomain::Cylinder {
            y_min: 0.0,
            y_max: 1.0,
        },
        MapFlags {
            isotopic_to_identity: true,
            area_preserving: c == 0.0,
            orientation_preserving: true,
        },
        forward,
    )
    .with_inverse(inverse)
    .with_base_line(curves))
}

/// Radial twist of the unit disk, `(r, θ) -> (r, θ + ω(r))`.
fn disk_twist(p: Point, omega: impl Fn(f64) -> f64, sign: f64) -> Point {
    rotate(p, sign * omega(p.norm()))
}

/// `f = J ∘ I` with `J = T ∘ I ∘ T⁻¹` and `T` the radial twist with
/// `ω(r) = strength * (r² - r0²)`. `Fix J = T(Fix I)` meets the vertical
/// diameter at the origin and at `(0, ±r0)`.
pub fn disk_twist_reflection(strength: f64, r0: f64) -> Result<MapSpec, MapError> {
    if !(0.0..1.0).contains(&r0) {
        return Err(MapError::ParameterRange {
            name: "r0".into(),
            value: r0,
            range: "[0, 1)".into(),
        });
    }
    let omega = move |r: f64| strength * (r * r - r0 * r0);
    let refl = |p: Point| Point::new(-p.x, p.y);
    let j = InvolutionSpec::new(
        format!("twist-conjugated reflection(strength = {strength}, r0 = {r0})"),
        InvariantDomain::ClosedDisk,
        true,
        move |p| disk_twist(refl(disk_twist(p, omega, -1.0)), omega, 1.0),
    )
    .with_fixed_set(vec![BaseCurve::new(0, move |s| {
        disk_twist(Point::new(0.0, 2.0 * s - 1.0), omega, 1.0)
    })]);
    Ok(build_from_involution(&j)?
        .with_name(format!("disk_twist_reflection(strength = {strength}, r0 = {r0})")))
}

/// Orientation-reversing `f = φ ∘ I` on the closed disk with
/// `φ = k ∘ R_π ∘ k⁻¹`, `k = R_β ∘ T_c`, where `T_c` twists the disk
/// `|p - c| < radius` by `ω(r) = strength (1 - (r/radius)²)²` and `β` rotates
/// `T_c(0)` onto the positive vertical axis. The unique symmetric fixed point
/// is `k(0)`, where `Dφ = -Id`, so `f(Fix I)` is tangent to `Fix I` there.
pub fn disk_half_turn_reflection(center: Point, radius: f64, strength: f64) -> Result<MapSpec, MapError> {
    if !(radius > 0.0 && center.norm() + radius <= 1.0) {
        return Err(MapError::InvalidParameter {
            name: "radius".into(),
            reason: "the twisted disk must lie inside the unit disk".into(),
        });
    }
    if center.norm() >= radius {
        return Err(MapError::InvalidParameter {
            name: "center".into(),
            reason: "the twisted disk must contain the origin".into(),
        });
    }
    let omega = move |r: f64| {
        if r < radius {
            let u = 1.0 - (r / radius) * (r / radius);
            strength * u * u
        } else {
            0.0
        }
    };
    let tc = move |p: Point, sign: f64| center + rotate(p - center, sign * omega((p - center).norm()));
    let t0 = tc(Point::ORIGIN, 1.0);
    let beta = 0.5 * PI - t0.y.atan2(t0.x);
    let k = move |p: Point| rotate(tc(p, 1.0), beta);
    let k_inv = move |p: Point| tc(rotate(p, -beta), -1.0);
    let phi = move |p: Point| k(-k_inv(p));
    let refl = |p: Point| Point::new(-p.x, p.y);
    Ok(MapSpec::new(
        format!("disk_half_turn_reflection(center = {center}, radius = {radius}, strength = {strength})"),
        InvariantDomain::ClosedDisk,
        MapFlags {
            isotopic_to_identity: false,
            area_preserving: true,
            orientation_preserving: false,
        },
        move |p| phi(refl(p)),
    )
    .with_inverse(move |p| refl(phi(p))))
}

/// Orientation-reversing plane map `f = φ ∘ I` with `φ = G⁻¹ ∘ (-Id) ∘ G`,
/// `G(x, y) = (u, y + u² - 1)`, `u = x + y - 1/2`. Its two fixed points
/// `(±1/√2, 1/2)` are mirror images with indices of opposite sign.
pub fn mirror_saddle_pair() -> MapSpec {
    let g = |p: Point| {
        let u = p.x + p.y - 0.5;
        Point::new(u, p.y + u * u - 1.0)
    };
    let g_inv = |q: Point| {
        let y = q.y - (q.x * q.x - 1.0);
        Point::new(q.x - (y - 0.5), y)
    };
    let phi = move |p: Point| g_inv(-g(p));
    let refl = |p: Point| Point::new(-p.x, p.y);
    MapSpec::new(
        "mirror_saddle_pair",
        InvariantDomain::Plane { extent: 3.0 },
        MapFlags {
            isotopic_to_identity: false,
            area_preserving: true,
            orientation_preserving: false,
        },
        move |p| phi(refl(p)),
    )
    .with_inverse(move |p| refl(phi(p)))
}

/// A map given by two expressions, with optional closed-form inverse.
pub fn from_expressions(
    forward: [&str; 2],
    inverse: Option<[&str; 2]>,
    domain: InvariantDomain,
    flags: MapFlags,
) -> Result<MapSpec, MapError> {
    let (f1, f2) = (Expr::parse(forward[0])?, Expr::parse(forward[1])?);
    let mut f = MapSpec::new(
        format!("({}, {})", forward[0], forward[1]),
        domain,
        flags,
        move |p| Point::new(f1.eval(p.x, p.y), f2.eval(p.x, p.y)),
    );
    if let Some(inv) = inverse {
        let (g1, g2) = (Expr::parse(inv[0])?, Expr::parse(inv[1])?);
        f = f.with_inverse(move |p| Point::new(g1.eval(p.x, p.y), g2.eval(p.x, p.y)));
    }
    Ok(f)
}

/// An involution given by two expressions.
pub fn involution_from_expressions(
    eval: [&str; 2],
    domain: InvariantDomain,
) -> Result<InvolutionSpec, MapError> {
    let (j1, j2) = (Expr::parse(eval[0])?, Expr::parse(eval[1])?);
    let jf = move |p: Point| Point::new(j1.eval(p.x, p.y), j2.eval(p.x, p.y));
    let det = fd_jacobian(&jf, Point::new(0.1, 0.1)).determinant();
    Ok(InvolutionSpec::new(
        format!("({}, {})", eval[0], eval[1]),
        domain,
        det < 0.0,
        jf,
    ))
}

/// A configuration parameter: a number or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

pub type Params = BTreeMap<String, ParamValue>;

pub const FAMILIES: &[&str] = &[
    "twist",
    "rigid_disk_rotation",
    "rigid_annulus_rotation",
    "normalized_standard",
    "wavy_twist",
    "identity",
    "disk_twist_reflection",
    "disk_half_turn_reflection",
    "mirror_saddle_pair",
];

struct ParamReader<'a> {
    family: &'a str,
    params: &'a Params,
    allowed: &'static [&'static str],
}

impl ParamReader<'_> {
    fn check(&self) -> Result<(), MapError> {
        for k in self.params.keys() {
            if !self.allowed.contains(&k.as_str()) {
                return Err(MapError::UnknownParameter {
                    family: self.family.into(),
                    name: k.clone(),
                });
            }
        }
        Ok(())
    }

    /// Numbers may be written as constant expressions such as `"pi/3"`.
    fn number(&self, name: &str, default: Option<f64>) -> Result<f64, MapError> {
        let v = match self.params.get(name) {
            Some(ParamValue::Number(v)) => *v,
            Some(ParamValue::Text(t)) => {
                let e = Expr::parse(t)?;
                e.eval(0.0, 0.0)
            }
            None => default.ok_or_else(|| MapError::InvalidParameter {
                name: name.into(),
                reason: "required".into(),
            })?,
        };
        if !v.is_finite() {
            return Err(MapError::InvalidParameter {
                name: name.into(),
                reason: "must be finite".into(),
            });
        }
        Ok(v)
    }

    fn profile(&self, name: &str, default: &str) -> Result<Profile, MapError> {
        match self.params.get(name) {
            Some(ParamValue::Text(t)) => Profile::parse(t),
            Some(ParamValue::Number(v)) => Ok(Profile::linear(0.0, 0.0).with_constant(*v)),
            None => Profile::parse(default),
        }
    }
}

impl Profile {
    fn with_constant(self, v: f64) -> Self {
        Self {
            label: format!("{v}"),
            f: Arc::new(move |_| v),
            df: Arc::new(|_| 0.0),
        }
    }
}

/// Constructs a builtin family by name.
///
/// `domain` overrides the family default where the family allows a choice.
pub fn builtin(family: &str, params: &Params, domain: Option<InvariantDomain>) -> Result<MapSpec, MapError> {
    let reader = |allowed: &'static [&'static str]| {
        let r = ParamReader {
            family,
            params,
            allowed,
        };
        r.check().map(|_| r)
    };
    let fixed_domain = |expected: InvariantDomain| -> Result<(), MapError> {
        match domain {
            Some(d) if d != expected => Err(MapError::UnsupportedDomain {
                family: family.into(),
                domain: d.name(),
            }),
            _ => Ok(()),
        }
    };
    match family {
        "twist" => {
            let r = reader(&["a"])?;
            let d = domain.unwrap_or(InvariantDomain::Cylinder {
                y_min: 0.0,
                y_max: 1.0,
            });
            d.validate()?;
            twist(r.profile("a", "2*pi*y")?, d)
        }
        "rigid_disk_rotation" => {
            let r = reader(&["alpha"])?;
            fixed_domain(InvariantDomain::ClosedDisk)?;
            Ok(rigid_disk_rotation(r.number("alpha", None)?))
        }
        "rigid_annulus_rotation" => {
            let r = reader(&["alpha"])?;
            fixed_domain(InvariantDomain::ClosedAnnulus)?;
            Ok(rigid_annulus_rotation(r.number("alpha", None)?))
        }
        "normalized_standard" => {
            let r = reader(&["k"])?;
            let (y0, y1) = match domain {
                None => (-PI, PI),
                Some(InvariantDomain::Cylinder { y_min, y_max }) => (y_min, y_max),
                Some(d) => {
                    return Err(MapError::UnsupportedDomain {
                        family: family.into(),
                        domain: d.name(),
                    })
                }
            };
            normalized_standard(r.number("k", Some(0.5))?, y0, y1)
        }
        "wavy_twist" => {
            let r = reader(&["a", "c"])?;
            fixed_domain(InvariantDomain::Cylinder {
                y_min: 0.0,
                y_max: 1.0,
            })?;
            wavy_twist(r.profile("a", "2*pi*y")?, r.number("c", Some(0.3))?)
        }
        "identity" => {
            reader(&[])?;
            let d = domain.unwrap_or(InvariantDomain::Strip);
            d.validate()?;
            Ok(identity(d))
        }
        "disk_twist_reflection" => {
            let r = reader(&["strength", "r0"])?;
            fixed_domain(InvariantDomain::ClosedDisk)?;
            disk_twist_reflection(r.number("strength", Some(3.0))?, r.number("r0", Some(0.2))?)
        }
        "disk_half_turn_reflection" => {
            let r = reader(&["cx", "cy", "radius", "strength"])?;
            fixed_domain(InvariantDomain::ClosedDisk)?;
            disk_half_turn_reflection(
                Point::new(r.number("cx", Some(0.2))?, r.number("cy", Some(0.1))?),
                r.number("radius", Some(0.6))?,
                r.number("strength", Some(2.0))?,
            )
        }
        "mirror_saddle_pair" => {
            reader(&[])?;
            fixed_domain(InvariantDomain::Plane { extent: 3.0 })?;
            Ok(mirror_saddle_pair())
        }
        other => Err(MapError::UnknownFamily(other.into())),
    }
}

/// `2π (√5 - 1) / 2`, a rotation angle with no periodic points.
pub const GOLDEN_ANGLE: f64 = TWO_PI * 0.618_033_988_749_894_8;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revmaps::{validate_area, validate_involution, validate_reversibility, TOL_REVERSIBILITY};

    fn cyl01() -> InvariantDomain {
        InvariantDomain::Cylinder {
            y_min: 0.0,
            y_max: 1.0,
        }
    }

    #[test]
    fn twist_iterate_example() {
        let f = twist(Profile::linear(TWO_PI, 0.0), cyl01()).unwrap();
        let p = f.iterate(Point::new(0.0, 0.5), 2).unwrap();
        assert!((p.x - TWO_PI).abs() < 1e-15 && p.y == 0.5);
        assert!(f.domain.distance(p, Point::new(0.0, 0.5)) < 1e-15);
    }

    #[test]
    fn standard_at_zero_is_linear_twist() {
        let g = normalized_standard(0.0, -PI, PI).unwrap();
        let t = twist(Profile::linear(1.0, 0.0), InvariantDomain::cylinder(-PI, PI).unwrap()).unwrap();
        for p in g.domain.halton_samples(200) {
            assert!((g.apply(p) - t.apply(p)).norm() < 1e-15);
        }
    }

    #[test]
    fn standard_conjugator_intertwines_reversors() {
        // h ∘ R = I ∘ h with R(x, y) = (-x, y + K sin x)
        let k = 0.7;
        let h = |p: Point| Point::new(p.x, p.y + 0.5 * k * p.x.sin());
        for p in InvariantDomain::cylinder(-PI, PI).unwrap().halton_samples(100) {
            let lhs = h(Point::new(-p.x, p.y + k * p.x.sin()));
            let rhs = h(p);
            assert!((lhs - Point::new(-rhs.x, rhs.y)).norm() < 1e-14);
        }
    }

    #[test]
    fn standard_closed_forms() {
        let g = normalized_standard(0.5, -PI, PI).unwrap();
        assert!(validate_reversibility(&g, 2000, TOL_REVERSIBILITY).pass);
        assert!(validate_area(&g, 2000, 1e-12).pass);
        for p in g.domain.halton_samples(200) {
            let fd = fd_jacobian(|q| g.apply(q), p);
            assert!((fd - g.jacobian(p)).abs().max() < 1e-7);
        }
        let i = g.reversor();
        for c in g.base_line().unwrap() {
            assert_eq!(c.at(0.0).y, -PI);
            assert_eq!(c.at(1.0).y, PI);
            for k in 0..=20 {
                let p = c.at(k as f64 / 20.0);
                assert!(g.domain.distance(i.apply(p), p) < 1e-12, "{p}");
            }
        }
    }

    #[test]
    fn wavy_twist_reversible_not_area_preserving() {
        let f = wavy_twist(Profile::parse("2*pi*y").unwrap(), 0.3).unwrap();
        assert!(validate_reversibility(&f, 2000, TOL_REVERSIBILITY).pass);
        assert!(!validate_area(&f, 2000, 1e-6).pass);
        assert!(!f.flags.area_preserving);
        let i = f.reversor();
        for c in f.base_line().unwrap() {
            for k in 0..=10 {
                let p = c.at(k as f64 / 10.0);
                assert!(f.domain.distance(i.apply(p), p) < 1e-12);
            }
        }
    }

    #[test]
    fn disk_rotation_has_order_six() {
        let f = rigid_disk_rotation(PI / 3.0);
        for p in f.domain.halton_samples(100) {
            assert!((f.apply_n(p, 6).unwrap() - p).norm() < 1e-12);
        }
        let i = f.reversor();
        let c = &f.base_line().unwrap()[0];
        for k in 0..=10 {
            let p = c.at(k as f64 / 10.0);
            assert!((i.apply(p) - p).norm() < 1e-15);
        }
    }

    #[test]
    fn disk_twist_reflection_fixed_points() {
        let f = disk_twist_reflection(3.0, 0.2).unwrap();
        assert!(f.flags.area_preserving && f.flags.orientation_preserving);
        for y in [0.0, 0.2, -0.2] {
            let p = Point::new(0.0, y);
            assert!((f.apply(p) - p).norm() < 1e-15);
        }
    }

    #[test]
    fn half_turn_reflection_is_reversible() {
        let f = disk_half_turn_reflection(Point::new(0.2, 0.1), 0.6, 2.0).unwrap();
        assert!(validate_reversibility(&f, 4000, TOL_REVERSIBILITY).pass);
        assert!(validate_involution(&f.reversor(), 4000, TOL_REVERSIBILITY).pass);
        assert!(validate_area(&f, 4000, 1e-6).pass);
        assert!(f.jacobian(Point::new(0.1, 0.3)).determinant() < 0.0);
    }

    #[test]
    fn mirror_saddle_pair_fixed_points() {
        let f = mirror_saddle_pair();
        let s = 0.5f64.sqrt();
        for x in [s, -s] {
            let p = Point::new(x, 0.5);
            assert!((f.apply(p) - p).norm() < 1e-14);
        }
        assert!(validate_reversibility(&f, 2000, TOL_REVERSIBILITY).pass);
        assert!((f.jacobian(Point::new(0.3, 0.2)).determinant() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn builtin_dispatch() {
        let mut p = Params::new();
        p.insert("alpha".into(), ParamValue::Text("pi/3".into()));
        let f = builtin("rigid_disk_rotation", &p, None).unwrap();
        assert!((f.apply(Point::new(1.0, 0.0)) - Point::new(0.5, 0.75f64.sqrt())).norm() < 1e-15);
        assert!(matches!(
            builtin("henon", &Params::new(), None),
            Err(MapError::UnknownFamily(_))
        ));
        let mut bad = Params::new();
        bad.insert("k".into(), ParamValue::Number(9.0));
        assert!(matches!(
            builtin("normalized_standard", &bad, None),
            Err(MapError::ParameterRange { .. })
        ));
        let mut extra = Params::new();
        extra.insert("q".into(), ParamValue::Number(1.0));
        assert!(matches!(
            builtin("twist", &extra, None),
            Err(MapError::UnknownParameter { .. })
        ));
        assert!(builtin("rigid_disk_rotation", &p, Some(InvariantDomain::Strip)).is_err());
    }
}
