//! Symmetry lines `Γ_m = Fix(f^m ∘ I)` and the symmetric periodic orbits at
//! their intersections.
//!
//! Only two lines are computed directly: `Γ₀ = Fix I` and `Γ₁ = Fix(f ∘ I)`.
//! Every other line is a pushforward, `Γ_{2j+i} = f^j(Γ_i)`, which keeps each
//! sample exactly on its line up to rounding. A point on `Γ_k ∩ Γ_ℓ` satisfies
//! `f^{k-ℓ}(z) = z` and is symmetric.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::{Matrix2, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{InvariantDomain, Point, INTERIOR_MARGIN, TWO_PI};
use crate::revmaps::{BaseCurve, MapError, MapSpec, DOMAIN_SLACK};

pub const LINE_TOL: f64 = 1e-8;
pub const ORBIT_TOL: f64 = 1e-10;
pub const DEDUPE_EPS: f64 = 1e-6;
pub const MAX_LINE_POINTS: usize = 2_000_000;
/// Crossings with a smaller sine between the segments are tangency candidates.
pub const TANGENCY_SINE: f64 = 1e-6;
/// Raw crossings closer than this are the same crossing.
pub const CROSSING_MERGE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmError {
    #[error("no roots of f(I p) = p found on {samples} seeds; f ∘ I may be fixed-point free")]
    NoRoots { samples: usize },
    #[error("refinement budget of {budget} points exceeded on line m = {m}")]
    Budget { m: u32, budget: usize },
    #[error("line pair ({high}, {low}) must have high > low")]
    InvalidPair { high: u32, low: u32 },
    #[error("refinement diverged near {0}")]
    Diverged(Point),
    #[error("no period dividing {bound} at {point}: residual {residual:e}")]
    NotPeriodic {
        point: Point,
        bound: u32,
        residual: f64,
    },
    #[error("no sample of line {0} near the candidate")]
    NotOnLine(u32),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Sampling controls for line generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolution {
    /// Initial parameter samples per base curve component.
    pub base_samples: usize,
    /// Largest admissible distance between consecutive samples; defaults to
    /// 1/200 of the domain diameter.
    pub max_edge: Option<f64>,
    pub max_points: usize,
    pub line_tol: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            base_samples: 200,
            max_edge: None,
            max_points: MAX_LINE_POINTS,
            line_tol: LINE_TOL,
        }
    }
}

impl Resolution {
    pub fn edge(&self, domain: &InvariantDomain) -> f64 {
        self.max_edge.unwrap_or(domain.diameter() / 200.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    BaseFixI,
    BaseFixFI,
    Pushforward { j: u32, base: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// One connected piece of a symmetry line with its base-curve parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub component: usize,
    pub params: Vec<f64>,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryLine {
    pub m: u32,
    pub parity: Parity,
    pub provenance: Provenance,
    pub branches: Vec<Branch>,
    /// Largest `‖f^m(I p) − p‖` over the stored samples.
    pub max_residual: f64,
    pub certified: bool,
}

impl SymmetryLine {
    pub fn n_points(&self) -> usize {
        self.branches.iter().map(|b| b.points.len()).sum()
    }
}

/// The generating curves `Γ₀` and `Γ₁`, each one parametrized curve per
/// component.
#[derive(Clone, Debug)]
pub struct BaseCurves {
    pub gamma0: Vec<BaseCurve>,
    pub gamma1: Vec<BaseCurve>,
    /// True when `Γ₁` was traced numerically rather than given in closed form.
    pub traced: bool,
    /// Isolated points of `Fix(f ∘ I)` found by the tracer.
    pub isolated: Vec<Point>,
}

impl BaseCurves {
    pub fn of(&self, i: u32) -> &[BaseCurve] {
        if i == 0 {
            &self.gamma0
        } else {
            &self.gamma1
        }
    }
}

fn fix_i_curves(domain: &InvariantDomain) -> Vec<BaseCurve> {
    domain
        .fixed_locus()
        .into_iter()
        .map(|seg| BaseCurve::new(seg.component_id, move |s| seg.at(s)))
        .collect()
}

/// Closed-form `Γ₀` and `Γ₁`, or a traced `Γ₁` when the map carries no formula.
pub fn base_curves(f: &MapSpec) -> Result<BaseCurves, SymmError> {
    let gamma0 = fix_i_curves(&f.domain);
    match f.base_line() {
        Some(c) => Ok(BaseCurves {
            gamma0,
            gamma1: c.to_vec(),
            traced: false,
            isolated: Vec::new(),
        }),
        None => {
            let traced = trace_reversor_fixed_set(f)?;
            Ok(BaseCurves {
                gamma0,
                gamma1: traced.curves,
                traced: true,
                isolated: traced.isolated,
            })
        }
    }
}

/// `(Γ₀, Γ₁)` as sampled lines.
pub fn base_lines(f: &MapSpec, res: &Resolution) -> Result<(SymmetryLine, SymmetryLine), SymmError> {
    let set = LineSet::new(f.clone(), *res)?;
    Ok((set.line(0)?, set.line(1)?))
}

/// `Γ_m` for a single `m`.
pub fn symmetry_line(f: &MapSpec, m: u32, res: &Resolution) -> Result<SymmetryLine, SymmError> {
    LineSet::new(f.clone(), *res)?.line(m)
}

#[inline]
fn push(f: &MapSpec, p: Point, j: u32) -> Point {
    let mut q = p;
    for _ in 0..j {
        q = f.apply(q);
    }
    q
}

/// Residual `‖f^m(I p) − p‖` in the domain metric.
pub fn line_residual(f: &MapSpec, m: u32, p: Point) -> f64 {
    let d = f.domain;
    d.distance(push(f, d.reflect_lift(p), m), p)
}

/// Lines of one map sharing the base curves and resolution.
#[derive(Clone)]
pub struct LineSet {
    pub f: MapSpec,
    pub bases: BaseCurves,
    pub resolution: Resolution,
}

impl LineSet {
    pub fn new(f: MapSpec, resolution: Resolution) -> Result<Self, SymmError> {
        let bases = base_curves(&f)?;
        Ok(Self {
            f,
            bases,
            resolution,
        })
    }

    pub fn with_bases(f: MapSpec, bases: BaseCurves, resolution: Resolution) -> Self {
        Self {
            f,
            bases,
            resolution,
        }
    }

    /// Point of `Γ_m` at parameter `s` of base component `branch`.
    #[inline]
    pub fn eval(&self, m: u32, branch: usize, s: f64) -> Point {
        let curve = &self.bases.of(m % 2)[branch];
        push(&self.f, curve.at(s.clamp(0.0, 1.0)), m / 2)
    }

    pub fn line(&self, m: u32) -> Result<SymmetryLine, SymmError> {
        let (j, i) = (m / 2, m % 2);
        let edge = self.resolution.edge(&self.f.domain);
        let n0 = self.resolution.base_samples.max(2);
        let mut branches = Vec::new();
        let mut total = 0usize;
        for (b, curve) in self.bases.of(i).iter().enumerate() {
            let mut params = Vec::new();
            let mut points = Vec::new();
            let image = |s: f64| self.eval(m, b, s);
            let first = image(0.0);
            params.push(0.0);
            points.push(first);
            // degenerate single-point components are stored as such
            if curve.at(0.0) == curve.at(1.0) && curve.at(0.5) == curve.at(0.0) {
                branches.push(Branch {
                    component: curve.component,
                    params,
                    points,
                });
                continue;
            }
            let mut prev = (0.0, first);
            for k in 1..=n0 {
                let s = k as f64 / n0 as f64;
                let next = (s, image(s));
                // depth-first midpoint insertion keeps the output ordered
                let mut stack = vec![next];
                while let Some(&(sb, pb)) = stack.last() {
                    let (sa, pa) = prev;
                    if (pb - pa).norm() > edge && sb - sa > 1e-13 {
                        let sm = 0.5 * (sa + sb);
                        stack.push((sm, image(sm)));
                    } else {
                        params.push(sb);
                        points.push(pb);
                        prev = (sb, pb);
                        stack.pop();
                        if total + points.len() > self.resolution.max_points {
                            return Err(SymmError::Budget {
                                m,
                                budget: self.resolution.max_points,
                            });
                        }
                    }
                }
            }
            total += points.len();
            branches.push(Branch {
                component: curve.component,
                params,
                points,
            });
        }
        let max_residual = branches
            .par_iter()
            .map(|b| {
                b.points
                    .iter()
                    .map(|&p| line_residual(&self.f, m, p))
                    .fold(0.0f64, |a, r| if r.is_nan() { f64::INFINITY } else { a.max(r) })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0f64, f64::max);
        let provenance = match m {
            0 => Provenance::BaseFixI,
            1 => Provenance::BaseFixFI,
            _ => Provenance::Pushforward { j, base: i },
        };
        Ok(SymmetryLine {
            m,
            parity: Parity::of(m),
            provenance,
            branches,
            max_residual,
            certified: max_residual <= self.resolution.line_tol,
        })
    }

    /// Lines `Γ_0 ..= Γ_max_m`, generated in parallel.
    pub fn lines(&self, max_m: u32) -> Result<Vec<SymmetryLine>, SymmError> {
        (0..=max_m).into_par_iter().map(|m| self.line(m)).collect()
    }
}

/// A crossing of two sampled lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub point: Point,
    pub high: u32,
    pub low: u32,
    pub high_component: usize,
    pub low_component: usize,
    pub high_branch: usize,
    pub low_branch: usize,
    pub high_param: f64,
    pub low_param: f64,
    /// `|sin|` of the angle between the crossing segments.
    pub transversality: f64,
    pub low_confidence: bool,
}

impl Crossing {
    /// Upper bound for the period: `f^{high - low}(z) = z`.
    pub fn period_bound(&self) -> u32 {
        self.high - self.low
    }

    /// Odd exactly when the two line parities differ.
    pub fn parity(&self) -> Parity {
        Parity::of(self.high - self.low)
    }
}

struct Seg {
    branch: usize,
    index: usize,
    a: Point,
    b: Point,
}

fn segments(line: &SymmetryLine) -> Vec<Seg> {
    let mut out = Vec::new();
    for (bi, br) in line.branches.iter().enumerate() {
        for (i, w) in br.points.windows(2).enumerate() {
            out.push(Seg {
                branch: bi,
                index: i,
                a: w[0],
                b: w[1],
            });
        }
    }
    out
}

/// All crossings of `high` with `low`. Tangential crossings are kept but
/// flagged; collinear overlaps are skipped.
pub fn intersect_lines(
    high: &SymmetryLine,
    low: &SymmetryLine,
    domain: &InvariantDomain,
) -> Result<Vec<Crossing>, SymmError> {
    if high.m <= low.m {
        return Err(SymmError::InvalidPair {
            high: high.m,
            low: low.m,
        });
    }
    let sh = segments(high);
    let sl = segments(low);
    if sh.is_empty() || sl.is_empty() {
        return Ok(Vec::new());
    }
    let longest = sh
        .iter()
        .chain(sl.iter())
        .map(|s| (s.b - s.a).norm())
        .fold(0.0f64, f64::max);
    let periodic = domain.is_periodic();
    let mut h = longest.max(domain.diameter() / 4000.0);
    let ncols = if periodic {
        let n = (TWO_PI / h).floor().max(1.0) as i64;
        h = TWO_PI / n as f64;
        n
    } else {
        i64::MAX
    };
    let col = |x: f64| -> i64 { (x / h).floor() as i64 };
    let wrap_col = |c: i64| if periodic { c.rem_euclid(ncols) } else { c };
    let cells = |s: &Seg| {
        let (c0, c1) = (col(s.a.x.min(s.b.x)), col(s.a.x.max(s.b.x)));
        let (r0, r1) = (col(s.a.y.min(s.b.y)), col(s.a.y.max(s.b.y)));
        let mut v = Vec::new();
        for c in c0..=c1.min(c0 + ncols.min(1 << 20) - 1) {
            for r in r0..=r1 {
                v.push((wrap_col(c), r));
            }
        }
        v
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in sl.iter().enumerate() {
        for cell in cells(s) {
            grid.entry(cell).or_default().push(i);
        }
    }
    let found: Vec<Vec<Crossing>> = sh
        .par_iter()
        .map(|s1| {
            let mut cand: Vec<usize> = cells(s1)
                .into_iter()
                .filter_map(|c| grid.get(&c))
                .flatten()
                .copied()
                .collect();
            cand.sort_unstable();
            cand.dedup();
            let mut out = Vec::new();
            for &i2 in &cand {
                let s2 = &sl[i2];
                let shifts: &[f64] = if periodic {
                    &[0.0, -TWO_PI, TWO_PI]
                } else {
                    &[0.0]
                };
                let base = if periodic {
                    TWO_PI * ((0.5 * (s1.a.x + s1.b.x) - 0.5 * (s2.a.x + s2.b.x)) / TWO_PI).round()
                } else {
                    0.0
                };
                for &extra in shifts {
                    let off = Point::new(base + extra, 0.0);
                    if let Some((t, u, sine)) = segment_hit(s1.a, s1.b, s2.a + off, s2.b + off) {
                        let bh = &high.branches[s1.branch];
                        let bl = &low.branches[s2.branch];
                        let hp = bh.params[s1.index] + t * (bh.params[s1.index + 1] - bh.params[s1.index]);
                        let lp = bl.params[s2.index] + u * (bl.params[s2.index + 1] - bl.params[s2.index]);
                        out.push(Crossing {
                            point: s1.a.lerp(s1.b, t),
                            high: high.m,
                            low: low.m,
                            high_component: bh.component,
                            low_component: bl.component,
                            high_branch: s1.branch,
                            low_branch: s2.branch,
                            high_param: hp,
                            low_param: lp,
                            transversality: sine,
                            low_confidence: sine < TANGENCY_SINE,
                        });
                    }
                }
            }
            out
        })
        .collect();
    let mut merged: Vec<Crossing> = Vec::new();
    for c in found.into_iter().flatten() {
        let dup = merged.iter().any(|m| {
            m.high_branch == c.high_branch
                && m.low_branch == c.low_branch
                && domain.distance(m.point, c.point) < CROSSING_MERGE
        });
        if !dup {
            merged.push(c);
        }
    }
    Ok(merged)
}

/// Closed-segment intersection; `None` for parallel segments.
fn segment_hit(p: Point, p2: Point, q: Point, q2: Point) -> Option<(f64, f64, f64)> {
    let r = p2 - p;
    let s = q2 - q;
    let denom = r.cross(s);
    let scale = r.norm() * s.norm();
    if scale == 0.0 {
        return None;
    }
    let sine = denom.abs() / scale;
    if sine < 1e-12 {
        return None;
    }
    let qp = q - p;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    const EPS: f64 = 1e-12;
    if (-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u) {
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0), sine))
    } else {
        None
    }
}

/// A certified symmetric periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricOrbit {
    /// Orbit point on `Γ₀` or `Γ₁` (angles reduced to `[0, 2π)`).
    pub seed: Point,
    /// Minimal period.
    pub period: u32,
    /// Indices `(k, ℓ)` of the lines whose crossing produced the orbit.
    pub witness: (u32, u32),
    pub parity: Parity,
    /// `‖f^period(z) − z‖`.
    pub residual: f64,
    /// `min over ℓ < period of ‖f^ℓ(z) − I z‖`.
    pub symmetric_residual: f64,
    /// The smallest `ℓ` attaining the symmetric certificate.
    pub symmetric_step: u32,
    pub interior: bool,
    pub orbit_points: Vec<Point>,
}

impl SymmetricOrbit {
    pub fn certified(&self, tol: f64) -> bool {
        self.residual <= tol && self.symmetric_residual <= tol
    }
}

/// Certificates for a candidate `z` with `f^bound(z) = z`.
pub fn certify(f: &MapSpec, z: Point, bound: u32, witness: (u32, u32), tol: f64) -> Result<SymmetricOrbit, SymmError> {
    let d = f.domain;
    let mut orbit = Vec::with_capacity(bound as usize + 1);
    let mut q = z;
    orbit.push(q);
    for _ in 0..bound {
        q = f.apply(q);
        orbit.push(q);
    }
    let period = (1..=bound)
        .filter(|p| bound % p == 0)
        .find(|&p| d.distance(orbit[p as usize], z) <= tol)
        .ok_or(SymmError::NotPeriodic {
            point: z,
            bound,
            residual: d.distance(orbit[bound as usize], z),
        })?;
    let residual = d.distance(orbit[period as usize], z);
    let iz = d.reflect_lift(z);
    let mut best = (f64::INFINITY, 0u32);
    for l in 0..period {
        let r = d.distance(orbit[l as usize], iz);
        if r <= tol {
            best = (r, l);
            break;
        }
        if r < best.0 {
            best = (r, l);
        }
    }
    let points: Vec<Point> = orbit[..period as usize].iter().map(|&p| d.canonical(p)).collect();
    let interior = points.iter().all(|&p| d.is_interior(p, INTERIOR_MARGIN));
    Ok(SymmetricOrbit {
        seed: d.canonical(z),
        period,
        witness,
        parity: Parity::of(period),
        residual,
        symmetric_residual: best.0,
        symmetric_step: best.1,
        interior,
        orbit_points: points,
    })
}

impl LineSet {
    /// Newton on `(s, t) ↦ Γ_high(s) − Γ_low(t)` from a sampled crossing, then
    /// certification at the point of the lower line.
    pub fn refine(&self, c: &Crossing, tol: f64) -> Result<SymmetricOrbit, SymmError> {
        let d = self.f.domain;
        let g = |s: f64, t: f64| {
            d.displacement(
                self.eval(c.low, c.low_branch, t),
                self.eval(c.high, c.high_branch, s),
            )
        };
        let (mut s, mut t) = (c.high_param, c.low_param);
        let mut r = g(s, t);
        let h = 1e-7;
        for _ in 0..60 {
            let rn = r.norm();
            if rn < 1e-15 {
                break;
            }
            let ds = (g(s + h, t) - g(s - h, t)) * (0.5 / h);
            let dt = (g(s, t + h) - g(s, t - h)) * (0.5 / h);
            let jac = Matrix2::new(ds.x, dt.x, ds.y, dt.y);
            let Some(step) = crate::revmaps::solve2(&jac, r) else {
                break;
            };
            let mut lambda = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let (sn, tn) = ((s - lambda * step.x).clamp(0.0, 1.0), (t - lambda * step.y).clamp(0.0, 1.0));
                let rc = g(sn, tn);
                if rc.norm() < rn {
                    s = sn;
                    t = tn;
                    r = rc;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let z = self.eval(c.low, c.low_branch, t);
        if !z.is_finite() || r.norm() > 1e-6 {
            return Err(SymmError::Diverged(c.point));
        }
        certify(&self.f, z, c.period_bound(), (c.high, c.low), tol)
    }

    /// Refines a free candidate point known to lie near `Γ_k ∩ Γ_ℓ`.
    pub fn refine_point(&self, candidate: Point, witness: (u32, u32), tol: f64) -> Result<SymmetricOrbit, SymmError> {
        let (k, l) = witness;
        if k <= l {
            return Err(SymmError::InvalidPair { high: k, low: l });
        }
        let lk = self.line(k)?;
        let ll = self.line(l)?;
        let d = self.f.domain;
        let nearest = |line: &SymmetryLine| {
            let mut best: Option<(f64, usize, f64)> = None;
            for (bi, b) in line.branches.iter().enumerate() {
                for (p, &s) in b.points.iter().zip(&b.params) {
                    let dist = d.distance(*p, candidate);
                    if best.is_none_or(|(bd, _, _)| dist < bd) {
                        best = Some((dist, bi, s));
                    }
                }
            }
            best
        };
        let (_, hb, hs) = nearest(&lk).ok_or(SymmError::NotOnLine(k))?;
        let (_, lb, ls) = nearest(&ll).ok_or(SymmError::NotOnLine(l))?;
        let c = Crossing {
            point: candidate,
            high: k,
            low: l,
            high_component: lk.branches[hb].component,
            low_component: ll.branches[lb].component,
            high_branch: hb,
            low_branch: lb,
            high_param: hs,
            low_param: ls,
            transversality: 1.0,
            low_confidence: false,
        };
        self.refine(&c, tol)
    }
}

/// Candidate-free refinement entry point.
pub fn refine_symmetric_orbit(
    f: &MapSpec,
    candidate: Point,
    witness: (u32, u32),
    tol: f64,
) -> Result<SymmetricOrbit, SymmError> {
    LineSet::new(f.clone(), Resolution::default())?.refine_point(candidate, witness, tol)
}

/// Result of a symmetric-orbit search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub max_period: u32,
    pub orbits: Vec<SymmetricOrbit>,
    /// Every symmetry line coincides with `Fix I` pointwise; crossings are
    /// not isolated and the catalog is empty by construction.
    pub degenerate: bool,
    /// Tangential crossings that were not refined.
    pub tangencies: Vec<Point>,
    pub warnings: Vec<String>,
}

fn dedupe_key(o: &SymmetricOrbit) -> (bool, u32, u32, f64, f64) {
    let exact = o.witness.0 - o.witness.1 == o.period;
    (!exact, o.witness.0, o.witness.1, o.seed.y, o.seed.x)
}

/// True when the two orbits are the same set (or mirror images).
pub fn same_orbit(domain: &InvariantDomain, a: &SymmetricOrbit, b: &SymmetricOrbit, eps: f64) -> bool {
    a.orbit_points.iter().any(|&p| {
        domain.distance(p, b.seed) <= eps || domain.distance(domain.reflect_lift(p), b.seed) <= eps
    })
}

/// Merges entries describing the same orbit, keeping the one whose witness
/// matches its period, then the lowest witness.
pub fn dedupe_orbits(domain: &InvariantDomain, mut orbits: Vec<SymmetricOrbit>, eps: f64) -> Vec<SymmetricOrbit> {
    orbits.sort_by(|a, b| {
        let (ka, kb) = (dedupe_key(a), dedupe_key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3))
            .then(ka.4.total_cmp(&kb.4))
    });
    let mut kept: Vec<SymmetricOrbit> = Vec::new();
    for o in orbits {
        if !kept
            .iter()
            .any(|k| k.period == o.period && (same_orbit(domain, k, &o, eps) || same_orbit(domain, &o, k, eps)))
        {
            kept.push(o);
        }
    }
    sort_catalog(&mut kept);
    kept
}

pub fn sort_catalog(orbits: &mut [SymmetricOrbit]) {
    orbits.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.seed.y.total_cmp(&b.seed.y))
            .then(a.seed.x.total_cmp(&b.seed.x))
    });
}

/// True when `f` fixes `Fix I` pointwise, so all lines coincide.
pub fn is_degenerate(f: &MapSpec) -> bool {
    fix_i_curves(&f.domain).iter().all(|c| {
        (0..=32).all(|k| {
            let p = c.at(k as f64 / 32.0);
            f.domain.distance(f.apply(p), p) <= ORBIT_TOL
        })
    })
}

/// Symmetric periodic orbits of period at most `max_period`.
///
/// Every symmetric orbit of period `q` has a point on `Γ₀` or on `Γ₁`, and such
/// a point lies on `Γ_q ∩ Γ₀` or on `Γ_{q+1} ∩ Γ₁`. Intersecting each line with
/// the two base lines therefore finds every orbit whose base-line point lies
/// in the domain.
pub fn find_symmetric_periodic_points(f: &MapSpec, max_period: u32, res: &Resolution) -> Result<Catalog, SymmError> {
    let set = LineSet::new(f.clone(), *res)?;
    find_with(&set, max_period, ORBIT_TOL)
}

/// Raw refinement results for every line pair, before deduplication.
pub struct RawSearch {
    pub refined: Vec<SymmetricOrbit>,
    pub tangencies: Vec<Point>,
    pub warnings: Vec<String>,
}

pub fn search(set: &LineSet, max_period: u32, tol: f64) -> Result<RawSearch, SymmError> {
    let d = set.f.domain;
    let lines = set.lines(max_period + 1)?;
    let mut warnings = Vec::new();
    for l in &lines {
        if !l.certified {
            warnings.push(format!(
                "line {} residual {:e} exceeds {:e}",
                l.m, l.max_residual, set.resolution.line_tol
            ));
        }
    }
    let pairs: Vec<(u32, u32)> = (0..=1u32)
        .flat_map(|l| (l + 1..=(l + max_period).min(max_period + 1)).map(move |k| (k, l)))
        .collect();
    let crossings: Vec<Crossing> = pairs
        .par_iter()
        .map(|&(k, l)| intersect_lines(&lines[k as usize], &lines[l as usize], &d))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .filter(|c| d.contains_within(c.point, DOMAIN_SLACK))
        .collect();
    let tangencies: Vec<Point> = crossings.iter().filter(|c| c.low_confidence).map(|c| d.canonical(c.point)).collect();
    let results: Vec<Result<SymmetricOrbit, SymmError>> = crossings
        .par_iter()
        .filter(|c| !c.low_confidence)
        .map(|c| set.refine(c, tol))
        .collect();
    let mut refined = Vec::new();
    for r in results {
        match r {
            Ok(o) if d.contains_within(o.seed, DOMAIN_SLACK) => {
                if o.certified(tol) {
                    refined.push(o);
                } else {
                    warnings.push(format!(
                        "uncertified candidate at {}: residual {:e}, symmetric residual {:e}",
                        o.seed, o.residual, o.symmetric_residual
                    ));
                }
            }
            Ok(_) => {}
            Err(e) => warnings.push(e.to_string()),
        }
    }
    Ok(RawSearch {
        refined,
        tangencies,
        warnings,
    })
}

pub fn find_with(set: &LineSet, max_period: u32, tol: f64) -> Result<Catalog, SymmError> {
    let d = set.f.domain;
    if is_degenerate(&set.f) {
        return Ok(Catalog {
            max_period,
            orbits: Vec::new(),
            degenerate: true,
            tangencies: Vec::new(),
            warnings: vec!["f fixes Fix I pointwise: every symmetry line coincides with Γ0".into()],
        });
    }
    let raw = search(set, max_period, tol)?;
    Ok(Catalog {
        max_period,
        orbits: dedupe_orbits(&d, raw.refined, DEDUPE_EPS),
        degenerate: false,
        tangencies: raw.tangencies,
        warnings: raw.warnings,
    })
}

// ---------------------------------------------------------------------------
// Numerical tracing of Fix(f ∘ I) for maps without a closed-form base line.

/// Grid seeds per axis for the tracer.
pub const TRACE_GRID: usize = 48;

struct Traced {
    curves: Vec<BaseCurve>,
    isolated: Vec<Point>,
}

fn pinv_step(jac: &Matrix2<f64>, r: Point) -> (Point, f64, f64, Point) {
    let svd = SVD::new(*jac, true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let sv = svd.singular_values;
    let (imax, imin) = if sv[0] >= sv[1] { (0, 1) } else { (1, 0) };
    let (smax, smin) = (sv[imax], sv[imin]);
    let rv = nalgebra::Vector2::new(r.x, r.y);
    let mut step = nalgebra::Vector2::zeros();
    for i in 0..2 {
        if sv[i] > 1e-10 * smax.max(1e-300) {
            let ui = u.column(i);
            let vi = v_t.row(i).transpose();
            step += vi * (ui.dot(&rv) / sv[i]);
        }
    }
    let kernel = v_t.row(imin);
    (Point::new(step.x, step.y), smin, smax, Point::new(kernel[0], kernel[1]))
}

struct Reversor<'a> {
    f: &'a MapSpec,
}

impl Reversor<'_> {
    fn residual(&self, p: Point) -> Point {
        let d = self.f.domain;
        d.displacement(p, self.f.apply(d.reflect_lift(p)))
    }

    fn jacobian(&self, p: Point) -> Matrix2<f64> {
        crate::revmaps::fd_jacobian(|q| self.residual(q), p)
    }

    /// Minimum-norm Newton onto the zero set.
    fn project(&self, p: Point) -> Option<Point> {
        let mut q = p;
        for _ in 0..40 {
            let r = self.residual(q);
            if !r.is_finite() {
                return None;
            }
            if r.norm() < 1e-13 {
                return Some(q);
            }
            let (step, _, smax, _) = pinv_step(&self.jacobian(q), r);
            if smax < 1e-12 {
                return None;
            }
            q = q - step;
        }
        (self.residual(q).norm() < 1e-11).then_some(q)
    }

    fn tangent(&self, p: Point) -> Option<Point> {
        let (_, smin, smax, k) = pinv_step(&self.jacobian(p), Point::ORIGIN);
        (smin < 1e-6 * smax.max(1.0)).then_some(k)
    }
}

fn trace_reversor_fixed_set(f: &MapSpec) -> Result<Traced, SymmError> {
    let d = f.domain;
    let rev = Reversor { f };
    let w = d.window();
    let mut roots = Vec::new();
    for i in 0..TRACE_GRID {
        for j in 0..TRACE_GRID {
            let p = Point::new(
                w.x_min + (i as f64 + 0.5) / TRACE_GRID as f64 * w.width(),
                w.y_min + (j as f64 + 0.5) / TRACE_GRID as f64 * w.height(),
            );
            if !d.contains(p) {
                continue;
            }
            if let Some(q) = rev.project(p) {
                if d.contains_within(q, DOMAIN_SLACK) {
                    roots.push(q);
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(SymmError::NoRoots {
            samples: TRACE_GRID * TRACE_GRID,
        });
    }
    let step = d.diameter() / 400.0;
    let mut polylines: Vec<Vec<Point>> = Vec::new();
    let mut isolated: Vec<Point> = Vec::new();
    let covered = |p: Point, polylines: &[Vec<Point>], isolated: &[Point]| {
        polylines.iter().flatten().chain(isolated.iter()).any(|&q| d.distance(p, q) < 2.0 * step)
    };
    for &root in &roots {
        if covered(root, &polylines, &isolated) {
            continue;
        }
        let Some(t0) = rev.tangent(root) else {
            isolated.push(root);
            continue;
        };
        let forward = march(&rev, root, t0, step);
        let closed = forward.1;
        let mut pts = forward.0;
        if !closed {
            let mut back = march(&rev, root, -t0, step).0;
            back.reverse();
            back.pop();
            back.extend(pts);
            pts = back;
        } else {
            pts.push(root);
        }
        if pts.len() >= 2 {
            polylines.push(pts);
        } else {
            isolated.push(root);
        }
    }
    let curves = polylines
        .into_iter()
        .enumerate()
        .map(|(c, pts)| {
            let pts = Arc::new(pts);
            let f2 = f.clone();
            BaseCurve::new(c, move |s| {
                let n = pts.len() - 1;
                let u = s.clamp(0.0, 1.0) * n as f64;
                let i = (u.floor() as usize).min(n - 1);
                let p = pts[i].lerp(pts[i + 1], u - i as f64);
                Reversor { f: &f2 }.project(p).unwrap_or(p)
            })
        })
        .chain(isolated.iter().enumerate().map(|(k, &p)| BaseCurve::new(usize::MAX - k, move |_| p)))
        .collect();
    Ok(Traced { curves, isolated })
}

/// Predictor-corrector continuation from `start` along `dir` until the curve
/// leaves the domain or closes up.
fn march(rev: &Reversor<'_>, start: Point, dir: Point, step: f64) -> (Vec<Point>, bool) {
    let d = rev.f.domain;
    let mut pts = vec![start];
    let mut p = start;
    let mut tan = dir;
    let mut left = false;
    for _ in 0..20_000 {
        let mut h = step;
        let mut next = None;
        for _ in 0..12 {
            let pred = p + tan * h;
            if let Some(q) = rev.project(pred) {
                if d.contains_within(q, DOMAIN_SLACK) && d.distance(q, p) < 3.0 * h {
                    next = Some(q);
                    break;
                }
            }
            h *= 0.5;
        }
        let Some(q) = next else {
            return (pts, false);
        };
        let r = d.distance(q, start);
        if left && r < step {
            return (pts, true);
        }
        left |= r > 2.0 * step;
        let Some(mut t) = rev.tangent(q) else {
            pts.push(q);
            return (pts, false);
        };
        if t.dot(tan) < 0.0 {
            t = -t;
        }
        tan = t;
        pts.push(q);
        p = q;
    }
    (pts, false)
}

/// Total order on points used to make outputs independent of scheduling.
pub fn point_order(a: &Point, b: &Point) -> Ordering {
    a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x))
}

/// Symmetric orbits grouped by minimal period.
pub fn by_period(orbits: &[SymmetricOrbit]) -> BTreeMap<u32, Vec<&SymmetricOrbit>> {
    let mut m: BTreeMap<u32, Vec<&SymmetricOrbit>> = BTreeMap::new();
    for o in orbits {
        m.entry(o.period).or_default().push(o);
    }
    m
}
