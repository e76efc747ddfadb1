//! Finite checks for the existence results on reversible maps.
//!
//! Every theorem-level statement becomes a computation with a verdict: a
//! witness point, a certified orbit, a table of counts. When a predicted
//! object is not found the report carries a falsification candidate instead
//! of failing silently; the caller decides what to do with it.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{wrap_angle, wrap_difference, InvariantDomain, Point, INTERIOR_MARGIN, TWO_PI};
use crate::revmaps::{solve2, MapError, MapSpec, DOMAIN_SLACK};
use crate::symmlines::{
    certify, find_symmetric_periodic_points, Catalog, Parity, Resolution, SymmError, SymmetricOrbit,
    ORBIT_TOL,
};

pub const EQUIVARIANCE_TOL: f64 = 1e-10;
pub const EQUIVARIANCE_SAMPLES: usize = 2_000;
/// Grid points per period for the boundary displacement extrema.
pub const BOUNDARY_GRID: usize = 4_096;
/// Strictness margin of the boundary twist inequalities.
pub const BOUNDARY_MARGIN: f64 = 1e-12;
/// Samples of each fixed-locus component in the twist criterion.
pub const CRITERION_SAMPLES: usize = 2_048;
/// Grid in `y` for the spectrum root search.
pub const SPECTRUM_GRID: usize = 512;
pub const ROTATION_TOL: f64 = 1e-10;
/// Largest census depth accepted.
pub const CENSUS_CAP: u32 = 32;
/// Distance from `Fix I` below which a point counts as lying on it.
pub const ON_LOCUS: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0} has no lift to the strip; a band domain is required")]
    NoLift(&'static str),
    #[error("lift is not equivariant: residual {residual:e} at {point}")]
    NotEquivariant { point: Point, residual: f64 },
    #[error("orbit of {start} leaves the band at step {step}")]
    Escaped { start: Point, step: usize },
    #[error("boundary twist fails: sup(F1(x,y0) - x) = {lower_sup}, inf(F1(x,y1) - x) = {upper_inf}")]
    NoBoundaryTwist { lower_sup: f64, upper_inf: f64 },
    #[error("{0} is not a disk")]
    NotDisk(&'static str),
    #[error("N = {n} exceeds the census cap {cap}")]
    CensusCap { n: u32, cap: u32 },
    #[error("no symmetric fixed point found: {0}")]
    NotFound(String),
    #[error(transparent)]
    Symm(#[from] SymmError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A band map `F` written in strip coordinates with `F(x + 2π, y) = F(x, y) + (2π, 0)`.
#[derive(Debug, Clone)]
pub struct LiftedMap {
    map: MapSpec,
    y_min: f64,
    y_max: f64,
    pub equivariance_residual: f64,
}

impl LiftedMap {
    pub fn new(map: MapSpec) -> Result<Self, HarnessError> {
        let (y_min, y_max) = match map.domain {
            InvariantDomain::Strip => (0.0, 1.0),
            InvariantDomain::ClosedAnnulus | InvariantDomain::OpenAnnulus => (1.0, 2.0),
            InvariantDomain::Cylinder { y_min, y_max } => (y_min, y_max),
            d => return Err(HarnessError::NoLift(d.name())),
        };
        let shift = Point::new(TWO_PI, 0.0);
        let mut worst = (0.0f64, Point::ORIGIN);
        for p in map.domain.halton_samples(EQUIVARIANCE_SAMPLES) {
            let r = (map.apply(p + shift) - map.apply(p) - shift).norm();
            if !(r <= worst.0) {
                worst = (r, p);
            }
        }
        if !(worst.0 <= EQUIVARIANCE_TOL) {
            return Err(HarnessError::NotEquivariant {
                point: worst.1,
                residual: worst.0,
            });
        }
        Ok(Self {
            map,
            y_min,
            y_max,
            equivariance_residual: worst.0,
        })
    }

    pub fn map(&self) -> &MapSpec {
        &self.map
    }

    pub fn band(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        self.map.apply(p)
    }

    #[inline]
    pub fn f1(&self, p: Point) -> f64 {
        self.map.apply(p).x
    }

    #[inline]
    pub fn f2(&self, p: Point) -> f64 {
        self.map.apply(p).y
    }

    fn in_band(&self, p: Point) -> bool {
        p.y >= self.y_min - DOMAIN_SLACK && p.y <= self.y_max + DOMAIN_SLACK
    }
}

/// `(F₁ⁿ(p) - x(p)) / (2πn)`.
pub fn rotation_number(f: &LiftedMap, p: Point, n_iter: usize) -> Result<f64, HarnessError> {
    let mut q = p;
    for step in 1..=n_iter.max(1) {
        q = f.apply(q);
        if !f.in_band(q) || !q.is_finite() {
            return Err(HarnessError::Escaped { start: p, step });
        }
    }
    Ok((q.x - p.x) / (TWO_PI * n_iter.max(1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: u32,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Last continued-fraction convergent of `x` with denominator at most
/// `q_max`, accepted only when it is within `1/(4q²)` of `x`.
pub fn rationalize(x: f64, q_max: u32) -> Option<Rational> {
    if !x.is_finite() || q_max == 0 {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    let mut best = None;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let (h, k) = (ai * h1 + h0, ai * k1 + k0);
        if k > q_max as i64 {
            break;
        }
        best = Some(Rational { p: h, q: k as u32 });
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = r - a;
        if frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    best.filter(|c| (x - c.value()).abs() < 0.25 / (c.q as f64 * c.q as f64))
}

/// Reduced `p/q` with `q ≤ q_max` and `lower < 2πp/q < upper`, ordered by
/// `q` then `p`.
pub fn admissible_rationals(lower: f64, upper: f64, q_max: u32) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        let qf = q as f64;
        let p_lo = (lower * qf / TWO_PI).floor() as i64;
        let p_hi = (upper * qf / TWO_PI).ceil() as i64;
        for p in p_lo..=p_hi {
            let w = TWO_PI * p as f64 / qf;
            if lower < w && w < upper && gcd(p.unsigned_abs(), q as u64) == 1 {
                out.push(Rational { p, q });
            }
        }
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extrema of the boundary displacements `F₁(x, y) - x` over one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTwist {
    /// `min_x F₁(x, y_min) - x`.
    pub lower: f64,
    /// `max_x F₁(x, y_min) - x`.
    pub lower_sup: f64,
    /// `min_x F₁(x, y_max) - x`.
    pub upper_inf: f64,
    /// `max_x F₁(x, y_max) - x`.
    pub upper: f64,
    pub satisfied: bool,
    pub grid: usize,
}

impl BoundaryTwist {
    /// Displacements `2πp/q` strictly inside this interval are forced on
    /// every orbit configuration compatible with the sampled boundary.
    pub fn guaranteed_interval(&self) -> (f64, f64) {
        (self.lower_sup, self.upper_inf)
    }
}

pub fn boundary_twist(f: &LiftedMap) -> BoundaryTwist {
    let (y0, y1) = f.band();
    let n = BOUNDARY_GRID;
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let x = TWO_PI * i as f64 / n as f64;
            (f.f1(Point::new(x, y0)) - x, f.f1(Point::new(x, y1)) - x)
        })
        .unzip();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lower_sup, upper_inf) = (max(&lo), min(&hi));
    BoundaryTwist {
        lower: min(&lo),
        lower_sup,
        upper_inf,
        upper: max(&hi),
        satisfied: lower_sup < -BOUNDARY_MARGIN && upper_inf > BOUNDARY_MARGIN,
        grid: n,
    }
}

/// Verdict of the twist criterion on one component `Y_i` of `Fix I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub component_id: usize,
    /// `f(Y_i) ∩ Y_i ≠ ∅` at sampling resolution.
    pub intersects: bool,
    /// The intersection contains an interior point of the domain.
    pub interior: bool,
    /// A symmetric fixed point on `Y_i` found by the line finder.
    pub witness: Option<Point>,
    pub witness_interior: bool,
    /// Points of `Y_i` whose image lies on `Y_i`.
    pub image_hits: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistReport {
    pub map: String,
    pub components: Vec<ComponentVerdict>,
    pub boundary_twist: Option<BoundaryTwist>,
    pub falsification_candidates: Vec<String>,
    pub notes: Vec<String>,
}

/// Offset of `p` from the vertical line `x = c`, reduced on periodic domains.
fn offset(d: &InvariantDomain, p: Point, c: f64) -> f64 {
    if d.is_periodic() {
        wrap_difference(p.x - c)
    } else {
        p.x - c
    }
}

fn bisect(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Tests `f(Y_i) ∩ Y_i ≠ ∅` for every component and cross-checks against the
/// symmetric fixed points found as `Γ₁ ∩ Γ₀`.
pub fn twist_criterion(f: &MapSpec, res: &Resolution) -> Result<TwistReport, HarnessError> {
    let d = f.domain;
    let mut notes = Vec::new();
    if !f.flags.isotopic_to_identity {
        notes.push("map is not flagged isotopic to the identity; the criterion is not predicted to hold".into());
    }
    let catalog = match find_symmetric_periodic_points(f, 1, res) {
        Ok(c) => c,
        Err(SymmError::NoRoots { .. }) => {
            notes.push("f ∘ I has no fixed points, so no symmetric fixed point exists".into());
            empty_catalog(1)
        }
        Err(e) => return Err(e.into()),
    };
    notes.extend(catalog.warnings.iter().cloned());
    let fixed: Vec<&SymmetricOrbit> = catalog.orbits.iter().filter(|o| o.period == 1).collect();
    let mut components = Vec::new();
    let mut candidates = Vec::new();
    for seg in d.fixed_locus() {
        let c = seg.start.x;
        let (ya, yb) = (seg.start.y.min(seg.end.y), seg.start.y.max(seg.end.y));
        let g = |s: f64| offset(&d, f.apply(seg.at(s)), c);
        let n = CRITERION_SAMPLES;
        let vals: Vec<f64> = (0..=n).map(|k| g(k as f64 / n as f64)).collect();
        let mut hits: Vec<f64> = Vec::new();
        for k in 0..=n {
            if vals[k].abs() <= 1e-12 {
                hits.push(k as f64 / n as f64);
            }
            if k < n && vals[k] * vals[k + 1] < 0.0 && (vals[k] - vals[k + 1]).abs() < PI {
                hits.push(bisect(k as f64 / n as f64, (k + 1) as f64 / n as f64, g));
            }
        }
        let hits: Vec<(f64, Point)> = hits
            .into_iter()
            .filter(|&s| {
                let q = f.apply(seg.at(s));
                q.y >= ya - DOMAIN_SLACK && q.y <= yb + DOMAIN_SLACK
            })
            .filter(|&s| !((s == 0.0 && seg.start_open) || (s == 1.0 && seg.end_open)))
            .map(|s| (s, seg.at(s)))
            .collect();
        let intersects = !hits.is_empty();
        let interior = hits
            .iter()
            .any(|&(s, p)| s > 0.0 && s < 1.0 && d.is_interior(p, INTERIOR_MARGIN) && d.is_interior(f.apply(p), INTERIOR_MARGIN));
        let on_component =
            |p: Point| offset(&d, p, c).abs() <= ON_LOCUS && p.y >= ya - DOMAIN_SLACK && p.y <= yb + DOMAIN_SLACK;
        let mut witness: Option<(Point, bool)> = None;
        if catalog.degenerate {
            let p = seg.at(0.5);
            if d.distance(f.apply(p), p) <= ORBIT_TOL {
                witness = Some((p, d.is_interior(p, INTERIOR_MARGIN)));
            }
        } else {
            // prefer an interior witness
            for o in &fixed {
                for &p in o.orbit_points.iter().chain(std::iter::once(&o.seed)) {
                    if on_component(p) && witness.is_none_or(|(_, int)| !int && o.interior) {
                        witness = Some((p, o.interior));
                    }
                }
            }
        }
        if f.flags.isotopic_to_identity {
            if intersects && witness.is_none() {
                candidates.push(format!(
                    "component {}: f(Y) meets Y but no symmetric fixed point was found",
                    seg.component_id
                ));
            }
            if !intersects && witness.is_some() {
                candidates.push(format!(
                    "component {}: symmetric fixed point found although f(Y) misses Y at sampling resolution",
                    seg.component_id
                ));
            }
        }
        components.push(ComponentVerdict {
            component_id: seg.component_id,
            intersects,
            interior,
            witness: witness.map(|w| w.0),
            witness_interior: witness.is_some_and(|w| w.1),
            image_hits: hits.into_iter().map(|h| h.1).collect(),
        });
    }
    let boundary = LiftedMap::new(f.clone()).ok().map(|l| boundary_twist(&l));
    if let Some(b) = &boundary {
        if b.satisfied && f.flags.isotopic_to_identity {
            for v in &components {
                if !v.witness_interior {
                    candidates.push(format!(
                        "component {}: boundary twist holds but no interior symmetric fixed point was found",
                        v.component_id
                    ));
                }
            }
        }
    }
    Ok(TwistReport {
        map: f.name.clone(),
        components,
        boundary_twist: boundary,
        falsification_candidates: candidates,
        notes,
    })
}

fn empty_catalog(max_period: u32) -> Catalog {
    Catalog {
        max_period,
        orbits: Vec::new(),
        degenerate: false,
        tangencies: Vec::new(),
        warnings: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub rational: Rational,
    pub component: usize,
    /// Number of certified roots on the component.
    pub roots: usize,
    pub rotation_number: Option<f64>,
    /// The lowest certified orbit on the component.
    pub orbit: Option<SymmetricOrbit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub map: String,
    pub q_max: u32,
    pub boundary: BoundaryTwist,
    pub rationals: Vec<Rational>,
    pub entries: Vec<SpectrumEntry>,
    pub falsification_candidates: Vec<String>,
}

impl Spectrum {
    pub fn orbits(&self) -> impl Iterator<Item = &SymmetricOrbit> {
        self.entries.iter().filter_map(|e| e.orbit.as_ref())
    }
}

/// Scalar whose zeros on `Y_c` are starting points of symmetric `q`-orbits
/// with rotation number `p/q`.
///
/// For `q = 2j` the `j`-th iterate must land on the line `x = x_c + πp`. For
/// `q = 2j + 1` iterates `j` and `j + 1` must be mirror images about that line.
fn spectrum_residual(f: &LiftedMap, r: Rational, xc: f64, y: f64) -> f64 {
    let j = r.q / 2;
    let mut p = Point::new(xc, y);
    for _ in 0..j {
        p = f.apply(p);
    }
    let axis = xc + PI * r.p as f64;
    if r.q % 2 == 0 {
        p.x - axis
    } else {
        p.x + f.apply(p).x - 2.0 * axis
    }
}

fn certify_lifted(f: &LiftedMap, r: Rational, z: Point) -> Option<(SymmetricOrbit, f64)> {
    let (y0, y1) = f.band();
    let mut orbit = vec![z];
    let mut q = z;
    for _ in 0..r.q {
        q = f.apply(q);
        if !f.in_band(q) || !q.is_finite() {
            return None;
        }
        orbit.push(q);
    }
    let shift = Point::new(TWO_PI * r.p as f64, 0.0);
    let residual = (q - z - shift).norm();
    let rot = (q.x - z.x) / (TWO_PI * r.q as f64);
    let symmetric_residual = wrap_difference(2.0 * z.x).abs();
    let points: Vec<Point> = orbit[..r.q as usize]
        .iter()
        .map(|p| Point::new(wrap_angle(p.x), p.y))
        .collect();
    let margin = INTERIOR_MARGIN;
    let interior = points.iter().all(|p| p.y > y0 + margin && p.y < y1 - margin);
    let o = SymmetricOrbit {
        seed: points[0],
        period: r.q,
        witness: (r.q, 0),
        parity: Parity::of(r.q),
        residual,
        symmetric_residual,
        symmetric_step: 0,
        interior,
        orbit_points: points,
    };
    (o.certified(ORBIT_TOL) && (rot - r.value()).abs() <= ROTATION_TOL).then_some((o, rot))
}

fn spectrum_entry(f: &LiftedMap, r: Rational, component: usize) -> SpectrumEntry {
    let xc = PI * component as f64;
    let (y0, y1) = f.band();
    let n = SPECTRUM_GRID;
    let ys: Vec<f64> = (0..=n).map(|k| y0 + (y1 - y0) * k as f64 / n as f64).collect();
    let g = |y: f64| spectrum_residual(f, r, xc, y);
    let vals: Vec<f64> = ys.iter().map(|&y| g(y)).collect();
    let mut roots = Vec::new();
    for k in 0..=n {
        if vals[k] == 0.0 {
            roots.push(ys[k]);
        } else if k < n && vals[k] * vals[k + 1] < 0.0 {
            roots.push(bisect(ys[k], ys[k + 1], g));
        }
    }
    let certified: Vec<(SymmetricOrbit, f64)> = roots
        .into_iter()
        .filter_map(|y| certify_lifted(f, r, Point::new(xc, y)))
        .collect();
    SpectrumEntry {
        rational: r,
        component,
        roots: certified.len(),
        rotation_number: certified.first().map(|c| c.1),
        orbit: certified.into_iter().next().map(|c| c.0),
    }
}

/// For each admissible `p/q` and each component of `Fix I`, a symmetric
/// `q`-periodic orbit with rotation number `p/q`.
pub fn farey_orbit_spectrum(f: &LiftedMap, q_max: u32) -> Result<Spectrum, HarnessError> {
    let boundary = boundary_twist(f);
    if !boundary.satisfied {
        return Err(HarnessError::NoBoundaryTwist {
            lower_sup: boundary.lower_sup,
            upper_inf: boundary.upper_inf,
        });
    }
    let (lo, hi) = boundary.guaranteed_interval();
    let rationals = admissible_rationals(lo, hi, q_max);
    let tasks: Vec<(Rational, usize)> = rationals.iter().flat_map(|&r| [(r, 0), (r, 1)]).collect();
    let entries: Vec<SpectrumEntry> = tasks.par_iter().map(|&(r, c)| spectrum_entry(f, r, c)).collect();
    let falsification_candidates = entries
        .iter()
        .filter(|e| e.orbit.is_none())
        .map(|e| {
            format!(
                "no symmetric orbit with rotation number {} on component {} (grid {})",
                e.rational, e.component, SPECTRUM_GRID
            )
        })
        .collect();
    Ok(Spectrum {
        map: f.map().name.clone(),
        q_max,
        boundary,
        rationals,
        entries,
        falsification_candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub max_period: u32,
    pub count_all: usize,
    pub count_odd: usize,
    pub count_interior: usize,
}

/// Deterministic work counters; wall time is left to the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusStats {
    pub lines: u32,
    pub orbits: usize,
    pub tangencies: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub map: String,
    pub rows: Vec<CensusRow>,
    pub stats: CensusStats,
    pub degenerate: bool,
    pub notes: Vec<String>,
}

/// Cumulative counts of symmetric orbits by period bound, for `N = 2..=n_max`.
///
/// Lines do not depend on `N`, so one search at `n_max` restricted to periods
/// `≤ N` gives the same rows as separate searches.
pub fn dichotomy_census(f: &MapSpec, n_max: u32, res: &Resolution) -> Result<CensusResult, HarnessError> {
    if n_max > CENSUS_CAP {
        return Err(HarnessError::CensusCap {
            n: n_max,
            cap: CENSUS_CAP,
        });
    }
    let catalog = match find_symmetric_periodic_points(f, n_max, res) {
        Ok(c) => c,
        Err(SymmError::NoRoots { .. }) => empty_catalog(n_max),
        Err(e) => return Err(e.into()),
    };
    Ok(census_from_catalog(f, &catalog))
}

pub fn census_from_catalog(f: &MapSpec, catalog: &Catalog) -> CensusResult {
    let rows: Vec<CensusRow> = (2..=catalog.max_period)
        .map(|n| {
            let sel = || catalog.orbits.iter().filter(move |o| o.period <= n);
            CensusRow {
                max_period: n,
                count_all: sel().count(),
                count_odd: sel().filter(|o| o.period % 2 == 1).count(),
                count_interior: sel().filter(|o| o.interior).count(),
            }
        })
        .collect();
    let mut notes = Vec::new();
    if !f.flags.area_preserving {
        notes.push("map is not flagged area preserving; the dichotomy is not predicted".into());
    }
    if let Some(last) = rows.last() {
        if last.count_all > 0 && last.count_interior == 0 {
            notes.push("periodic points found but none interior".into());
        }
    }
    CensusResult {
        map: f.name.clone(),
        rows,
        stats: CensusStats {
            lines: catalog.max_period + 2,
            orbits: catalog.orbits.len(),
            tangencies: catalog.tangencies.len(),
            warnings: catalog.warnings.len(),
        },
        degenerate: catalog.degenerate,
        notes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskRoute {
    /// `Γ₁ ∩ Γ₀` directly.
    Direct,
    /// A symmetric 2-periodic pair on `Fix I`, then a fixed point between them.
    PeriodTwo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskFixedPoint {
    pub orbit: SymmetricOrbit,
    pub route: DiskRoute,
    /// The 2-periodic point used by the reduction.
    pub via: Option<Point>,
}

fn require_disk(f: &MapSpec) -> Result<(), HarnessError> {
    match f.domain {
        InvariantDomain::ClosedDisk | InvariantDomain::OpenDisk => Ok(()),
        d => Err(HarnessError::NotDisk(d.name())),
    }
}

/// Interior symmetric fixed points `Γ₁ ∩ Γ₀` of a disk map.
pub fn disk_symmetric_fixed_points(f: &MapSpec, res: &Resolution) -> Result<Vec<SymmetricOrbit>, HarnessError> {
    require_disk(f)?;
    let catalog = find_symmetric_periodic_points(f, 1, res)?;
    Ok(catalog
        .orbits
        .into_iter()
        .filter(|o| o.period == 1 && o.interior && o.seed.x.abs() <= ON_LOCUS)
        .collect())
}

/// One interior symmetric fixed point. Orientation-reversing maps go through
/// a symmetric 2-periodic pair on `Fix I`.
pub fn disk_symmetric_fixed_point(f: &MapSpec, res: &Resolution) -> Result<DiskFixedPoint, HarnessError> {
    require_disk(f)?;
    if f.flags.orientation_preserving {
        let found = disk_symmetric_fixed_points(f, res)?;
        return found
            .into_iter()
            .next()
            .map(|orbit| DiskFixedPoint {
                orbit,
                route: DiskRoute::Direct,
                via: None,
            })
            .ok_or_else(|| HarnessError::NotFound("Γ1 does not cross the open diameter at this resolution".into()));
    }
    let catalog = find_symmetric_periodic_points(f, 2, res)?;
    let mut tried = 0;
    for o in catalog.orbits.iter().filter(|o| o.period == 2) {
        let Some(&z) = o.orbit_points.iter().find(|p| p.x.abs() <= ON_LOCUS) else {
            continue;
        };
        tried += 1;
        if let Ok(p) = period_two_reduction(f, z) {
            let orbit = certify(f, p, 1, (1, 0), ORBIT_TOL)?;
            if orbit.interior {
                return Ok(DiskFixedPoint {
                    orbit,
                    route: DiskRoute::PeriodTwo,
                    via: Some(z),
                });
            }
        }
    }
    Err(HarnessError::NotFound(format!(
        "{tried} symmetric 2-periodic points on Fix I, none reduced to a fixed point"
    )))
}

/// A symmetric fixed point on the segment of `Fix I` between a symmetric
/// 2-periodic point `z` and `f(z)`.
///
/// Sign changes of `f_y(0, y) - y` and of `f_x(0, y)` along the segment seed a
/// Newton solve of `f(p) = p`; the first solution on `Fix I` between the two
/// ends is returned.
pub fn period_two_reduction(f: &MapSpec, z: Point) -> Result<Point, HarnessError> {
    let fz = f.apply(z);
    if z.x.abs() > ON_LOCUS || fz.x.abs() > ON_LOCUS || (f.apply(fz) - z).norm() > 1e-9 {
        return Err(HarnessError::NotFound(format!("{z} is not a symmetric 2-periodic point on Fix I")));
    }
    let (a, b) = (z.y.min(fz.y), z.y.max(fz.y));
    let n = 512;
    let ys: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let gy = |y: f64| f.apply(Point::new(0.0, y)).y - y;
    let gx = |y: f64| f.apply(Point::new(0.0, y)).x;
    let mut seeds = Vec::new();
    for g in [&gy as &dyn Fn(f64) -> f64, &gx] {
        let vals: Vec<f64> = ys.iter().map(|&y| g(y)).collect();
        for k in 0..n {
            if vals[k] == 0.0 {
                seeds.push(ys[k]);
            } else if vals[k] * vals[k + 1] < 0.0 {
                seeds.push(bisect(ys[k], ys[k + 1], g));
            }
        }
    }
    for y in seeds {
        let mut p = Point::new(0.0, y);
        for _ in 0..50 {
            let r = f.apply(p) - p;
            if r.norm() <= 1e-14 {
                break;
            }
            let mut j = f.jacobian(p);
            j[(0, 0)] -= 1.0;
            j[(1, 1)] -= 1.0;
            match solve2(&j, r) {
                Some(step) => p = p - step,
                None => break,
            }
        }
        let ok = (f.apply(p) - p).norm() <= ORBIT_TOL
            && p.x.abs() <= ORBIT_TOL
            && p.y >= a - ON_LOCUS
            && p.y <= b + ON_LOCUS;
        if ok {
            return Ok(p);
        }
    }
    Err(HarnessError::NotFound(format!("no fixed point on Fix I between {z} and {fz}")))
}
