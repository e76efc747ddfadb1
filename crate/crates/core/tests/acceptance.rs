//! Acceptance criteria 1 to 10.
//!
//! Runs as a plain binary so every criterion prints one verdict line, passing
//! or not. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revsym_core::domains::{wrap_difference, InvariantDomain, Point, TWO_PI};
use revsym_core::families::{
    builtin, disk_half_turn_reflection, disk_twist_reflection, linear, mirror_saddle_pair,
    normalized_standard, rigid_annulus_rotation, rigid_disk_rotation, twist, wavy_twist, ParamValue, Params,
    Profile, FAMILIES, GOLDEN_ANGLE,
};
use revsym_core::harness::{
    boundary_twist, dichotomy_census, disk_symmetric_fixed_point,
    farey_orbit_spectrum, twist_criterion, DiskRoute, LiftedMap,
};
use revsym_core::revmaps::{
    build_from_involution, validate_involution, validate_reversibility, InvolutionSpec, MapSpec,
    DEFAULT_SAMPLES, TOL_REVERSIBILITY,
};
use revsym_core::symmlines::{
    base_lines, find_symmetric_periodic_points, search, LineSet, Resolution, SymmError, SymmetryLine,
    ORBIT_TOL,
};
use revsym_core::winding::{
    angle_variation, fixed_point_index, linear_index, mirror_index_check, Polyline,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn cyl01() -> InvariantDomain {
    InvariantDomain::cylinder(0.0, 1.0).unwrap()
}

fn standard() -> MapSpec {
    normalized_standard(0.5, -PI, PI).unwrap()
}

// ---------------------------------------------------------------------------
// 1. reversibility and involution algebra

fn all_builtins() -> Vec<MapSpec> {
    let mut maps: Vec<MapSpec> = FAMILIES
        .iter()
        .map(|&name| {
            let mut params = Params::new();
            if name.starts_with("rigid_") {
                params.insert("alpha".into(), ParamValue::Text("pi/3".into()));
            }
            builtin(name, &params, None).unwrap()
        })
        .collect();
    maps.push(twist(Profile::linear(TWO_PI, 0.25), cyl01()).unwrap());
    maps.push(twist(Profile::linear(TWO_PI, 0.0), InvariantDomain::Strip).unwrap());
    maps.push(twist(Profile::parse("1 + 2*sin(pi*y)").unwrap(), InvariantDomain::ClosedAnnulus).unwrap());
    maps.push(rigid_annulus_rotation(GOLDEN_ANGLE));
    maps.push(normalized_standard(2.0, -PI, PI).unwrap());
    maps.push(disk_twist_reflection(5.0, 0.0).unwrap());
    maps
}

fn criterion_1() -> Verdict {
    let mut worst = (0.0f64, 0.0f64, Duration::ZERO);
    let mut failures = Vec::new();
    let maps = all_builtins();
    for f in &maps {
        let t = Instant::now();
        let rev = validate_reversibility(f, DEFAULT_SAMPLES, TOL_REVERSIBILITY);
        let inv = validate_involution(&f.reversor(), DEFAULT_SAMPLES, TOL_REVERSIBILITY);
        let el = t.elapsed();
        worst = (worst.0.max(rev.max_residual), worst.1.max(inv.max_residual), worst.2.max(el));
        if !rev.pass || !inv.pass || el > Duration::from_secs(5) {
            failures.push(format!(
                "{}: rev {:.1e} inv {:.1e} {:.2?}",
                f.name, rev.max_residual, inv.max_residual, el
            ));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} maps x {} samples, max reversibility {:.1e}, max involution {:.1e}, slowest {:.2?}{}",
            maps.len(),
            DEFAULT_SAMPLES,
            worst.0,
            worst.1,
            worst.2,
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. variation of angle

/// A random path and a companion path offset by a nonvanishing field whose
/// angle moves less than π/2 per vertex.
fn random_pair(rng: &mut ChaCha8Rng, n: usize, closed: bool) -> (Polyline, Polyline) {
    let mut d = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let winding = if closed { rng.gen_range(-2i32..=2) } else { 0 };
    let phase = rng.gen_range(0.0..TWO_PI);
    let open_sweep = rng.gen_range(-6.0..6.0);
    for k in 0..n {
        let t = k as f64 / n as f64;
        let theta = if closed {
            phase + TWO_PI * winding as f64 * t + 0.3 * (TWO_PI * t).sin()
        } else {
            phase + open_sweep * t
        };
        let r = 0.2 + 0.1 * (TWO_PI * 3.0 * t).cos().abs();
        let v = Point::new(r * theta.cos(), r * theta.sin());
        d.push(p);
        g.push(p + v);
        p = p + Point::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
    }
    (Polyline::new(d, closed).unwrap(), Polyline::new(g, closed).unwrap())
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d2);
    let mut fails: Vec<String> = Vec::new();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let mut check = |ok: bool, what: &str| {
        if !ok && fails.len() < 5 {
            fails.push(what.to_string());
        }
    };
    for _ in 0..50 {
        let (d, g) = random_pair(&mut rng, 60, false);
        let v = angle_variation(&d, &g).unwrap().value;
        check(close(v, angle_variation(&g, &d).unwrap().value), "symmetry");
        check(close(-v, angle_variation(&d.reversed(), &g.reversed()).unwrap().value), "reversal");
        check(close(-v, angle_variation(&d.reflected(), &g.reflected()).unwrap().value), "reflection");

        // catenation: second pair starts where the first ends
        let (d2, g2) = random_pair(&mut rng, 60, false);
        let shift_d = *d.points.last().unwrap() - d2.points[0];
        let shift_g = *g.points.last().unwrap() - g2.points[0];
        let mut d2 = d2.map(|p| p + shift_d);
        let mut g2 = g2.map(|p| p + shift_g);
        d2.points[0] = *d.points.last().unwrap();
        g2.points[0] = *g.points.last().unwrap();
        let v2 = angle_variation(&d2, &g2).unwrap().value;
        let cat = angle_variation(&d.catenate(&d2).unwrap(), &g.catenate(&g2).unwrap()).unwrap().value;
        check(close(cat, v + v2), "catenation");

        // deformation twisting γ - δ by s·2t radians: the value moves by s/π
        let n = d.len();
        let mut drift = 0.0f64;
        for s in 1..=20 {
            let s = s as f64 / 20.0;
            let gs: Vec<Point> = d
                .points
                .iter()
                .zip(&g.points)
                .enumerate()
                .map(|(k, (&a, &b))| {
                    let (sn, cs) = (s * 2.0 * k as f64 / (n - 1) as f64).sin_cos();
                    let v = b - a;
                    a + Point::new(cs * v.x - sn * v.y, sn * v.x + cs * v.y)
                })
                .collect();
            let vs = angle_variation(&d, &Polyline::new(gs, false).unwrap()).unwrap().value;
            drift = drift.max((vs - v - s / PI).abs());
        }
        check(drift < 1e-9, "open homotopy continuity");
    }
    for _ in 0..50 {
        let (d, g) = random_pair(&mut rng, 80, true);
        let v = angle_variation(&d, &g).unwrap();
        check(v.is_integer_certified && (v.value - v.value.round()).abs() <= 1e-6, "loop integrality");
        // homotopy of loops: bend δ towards a circle while carrying γ along
        let c = Polyline::circle(d.points[0], 0.5, d.len());
        let base = v.rounded();
        for s in [0.25, 0.5, 0.75, 1.0] {
            let ds: Vec<Point> = d.points.iter().zip(&c.points).map(|(&a, &b)| a.lerp(b, s)).collect();
            let gs: Vec<Point> = ds.iter().zip(d.points.iter().zip(&g.points)).map(|(&p, (&a, &b))| p + (b - a)).collect();
            let vs = angle_variation(&Polyline::new(ds, true).unwrap(), &Polyline::new(gs, true).unwrap()).unwrap();
            check(vs.rounded() == base, "loop homotopy invariance");
        }
    }
    let mut index_hits = 0;
    let mut trials = 0;
    while index_hits < 10 {
        trials += 1;
        let a: Matrix2<f64> = Matrix2::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        if (a - Matrix2::identity()).determinant().abs() < 0.1 {
            continue;
        }
        let f = linear(a, InvariantDomain::plane(10.0).unwrap());
        let i = fixed_point_index(&f, Point::ORIGIN, 0.5, 64).unwrap();
        check(i.rounded() == Some(linear_index(&a)), "linear index oracle");
        index_hits += 1;
    }
    verdict(
        fails.is_empty(),
        format!(
            "50 open pairs, 50 loops, {index_hits} linear maps ({trials} drawn){}",
            if fails.is_empty() { String::new() } else { format!("; failed: {}", fails.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. mirror loops

/// A star-shaped loop around `c` inside the domain.
fn random_loop(rng: &mut ChaCha8Rng, c: Point, r: f64) -> Polyline {
    let n = 96;
    let a1 = rng.gen_range(0.0..0.3);
    let k = rng.gen_range(2..5) as f64;
    let ph = rng.gen_range(0.0..TWO_PI);
    let pts = (0..n)
        .map(|i| {
            let t = TWO_PI * i as f64 / n as f64;
            let rr = r * (1.0 + a1 * (k * t + ph).sin());
            c + Point::new(rr * t.cos(), rr * t.sin())
        })
        .collect();
    Polyline::new(pts, true).unwrap()
}

fn mirror_run(f: &MapSpec, rng: &mut ChaCha8Rng, sample: impl Fn(&mut ChaCha8Rng) -> (Point, f64), negate: bool) -> (usize, usize, Vec<i64>) {
    let mut ok = 0;
    let mut attempts = 0;
    let mut seen = Vec::new();
    while ok < 20 && attempts < 400 {
        attempts += 1;
        let (c, r) = sample(rng);
        let lp = random_loop(rng, c, r);
        let Ok((a, b)) = mirror_index_check(f, &lp) else {
            continue; // loop met a fixed point; draw again
        };
        let (Some(ia), Some(ib)) = (a.rounded(), b.rounded()) else {
            return (ok, attempts, seen);
        };
        if (negate && ia == -ib) || (!negate && ia == ib) {
            ok += 1;
            seen.push(ia);
        } else {
            return (ok, attempts, seen);
        }
    }
    (ok, attempts, seen)
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3);
    let mut lines = Vec::new();
    let mut pass = true;
    let cases: Vec<(MapSpec, Box<dyn Fn(&mut ChaCha8Rng) -> (Point, f64)>, bool)> = vec![
        (
            standard(),
            Box::new(|r: &mut ChaCha8Rng| (Point::new(r.gen_range(-0.5..4.0), r.gen_range(-1.0..1.0)), r.gen_range(0.3..1.2))),
            false,
        ),
        (
            rigid_disk_rotation(PI / 3.0),
            Box::new(|r: &mut ChaCha8Rng| (Point::new(r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)), r.gen_range(0.1..0.45))),
            false,
        ),
        (
            disk_twist_reflection(3.0, 0.2).unwrap(),
            Box::new(|r: &mut ChaCha8Rng| (Point::new(r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)), r.gen_range(0.05..0.45))),
            false,
        ),
        (
            twist(Profile::linear(TWO_PI, 0.25), cyl01()).unwrap(),
            Box::new(|r: &mut ChaCha8Rng| (Point::new(r.gen_range(0.0..TWO_PI), r.gen_range(0.3..0.7)), r.gen_range(0.05..0.25))),
            false,
        ),
        (
            mirror_saddle_pair(),
            Box::new(|r: &mut ChaCha8Rng| (Point::new(r.gen_range(-1.2..1.2), r.gen_range(0.0..1.0)), r.gen_range(0.1..0.8))),
            true,
        ),
    ];
    for (f, sample, negate) in &cases {
        let (ok, attempts, seen) = mirror_run(f, &mut rng, sample, *negate);
        let nonzero = seen.iter().filter(|&&i| i != 0).count();
        pass &= ok == 20;
        lines.push(format!(
            "{} {}: {ok}/20 ({attempts} drawn, {nonzero} nonzero)",
            f.name,
            if *negate { "negated" } else { "equal" }
        ));
    }
    verdict(pass, lines.join("; "))
}

// ---------------------------------------------------------------------------
// 4. pushforward lines against independent roots

/// Gauss-Newton onto the zero set of `res`. On `Fix(f^m ∘ I)` the Jacobian
/// of `f^m(I p) - p` has eigenvalues `0` and `-2`, so only the leading
/// singular direction is inverted; the other one is finite-difference noise.
fn pinv_newton(res: impl Fn(Point) -> Point, mut p: Point) -> Option<Point> {
    for _ in 0..60 {
        let r = res(p);
        if !r.is_finite() {
            return None;
        }
        if r.norm() < 1e-14 {
            return Some(p);
        }
        let h = 1e-7;
        let cx = (res(p + Point::new(h, 0.0)) - res(p - Point::new(h, 0.0))) * (0.5 / h);
        let cy = (res(p + Point::new(0.0, h)) - res(p - Point::new(0.0, h))) * (0.5 / h);
        let j = Matrix2::new(cx.x, cy.x, cx.y, cy.y);
        let svd = j.svd(true, true);
        let (u, vt) = (svd.u?, svd.v_t?);
        let k = svd.singular_values.imax();
        let s = svd.singular_values[k];
        if s < 1e-12 {
            return None;
        }
        let coef = (u[(0, k)] * r.x + u[(1, k)] * r.y) / s;
        let step = Point::new(vt[(k, 0)] * coef, vt[(k, 1)] * coef);
        p = p - step;
        if step.norm() < 1e-16 * (1.0 + p.norm()) {
            break;
        }
    }
    (res(p).norm() < 1e-12).then_some(p)
}

fn nearest_on_line(set: &LineSet, line: &SymmetryLine, p: Point) -> f64 {
    let d = set.f.domain;
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (bi, b) in line.branches.iter().enumerate() {
        for (k, &q) in b.points.iter().enumerate() {
            let dist = d.distance(q, p);
            if dist < best.0 {
                best = (dist, bi, k);
            }
        }
    }
    let (_, bi, k) = best;
    let params = &line.branches[bi].params;
    let (mut a, mut b) = (params[k.saturating_sub(1)], params[(k + 1).min(params.len() - 1)]);
    // golden-section search on the exact parametrization
    let g = |s: f64| d.distance(set.eval(line.m, bi, s), p);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let e = a + phi * (b - a);
        if g(c) < g(e) {
            b = e;
        } else {
            a = c;
        }
    }
    g(0.5 * (a + b)).min(best.0)
}

fn criterion_4() -> Verdict {
    let t = Instant::now();
    let f = standard();
    let d = f.domain;
    let set = LineSet::new(f.clone(), Resolution::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4);
    let mut max_res = 0.0f64;
    let mut haus = 0.0f64;
    let mut points = 0usize;
    let mut independent = 0usize;
    for m in 0..=8u32 {
        let line = set.line(m).unwrap();
        max_res = max_res.max(line.max_residual);
        let res = |p: Point| {
            let mut q = d.reflect_lift(p);
            for _ in 0..m {
                q = f.apply(q);
            }
            d.displacement(p, q)
        };
        // line samples onto the zero set
        for b in &line.branches {
            for &p in &b.points {
                points += 1;
                match pinv_newton(res, p) {
                    Some(q) => haus = haus.max(d.distance(p, q)),
                    None => haus = f64::INFINITY,
                }
            }
        }
        // independent roots onto the line
        let mut found = 0;
        let mut tries = 0;
        while found < 40 && tries < 4000 {
            tries += 1;
            let seed = Point::new(rng.gen_range(0.0..TWO_PI), rng.gen_range(-PI..PI));
            let Some(q) = pinv_newton(res, seed) else { continue };
            if !d.contains(q) {
                continue;
            }
            let mut pre = q;
            for _ in 0..m / 2 {
                pre = f.inverse(pre).unwrap();
            }
            if !d.contains(pre) {
                continue;
            }
            found += 1;
            haus = haus.max(nearest_on_line(&set, &line, q));
        }
        independent += found;
    }
    let el = t.elapsed();
    verdict(
        max_res <= 1e-8 && haus <= 1e-7 && el < Duration::from_secs(60),
        format!(
            "m <= 8: {points} samples, max residual {max_res:.1e}, {independent} independent roots, Hausdorff {haus:.1e}, {el:.2?}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. twist oracle

fn farey(n: u32) -> Vec<f64> {
    let mut v = Vec::new();
    for q in 1..=n as i64 {
        for p in 0..=q {
            let (mut a, mut b) = (p, q);
            while b != 0 {
                (a, b) = (b, a % b);
            }
            if a == 1 {
                v.push(p as f64 / q as f64);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

fn same_set(mut a: Vec<f64>, b: &[f64], tol: f64) -> bool {
    a.sort_by(f64::total_cmp);
    a.dedup_by(|x, y| (*x - *y).abs() <= tol);
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn criterion_5() -> Verdict {
    let f = twist(Profile::linear(TWO_PI, 0.0), cyl01()).unwrap();
    let cat = find_symmetric_periodic_points(&f, 12, &Resolution::default()).unwrap();
    let fn12 = farey(12);
    let mut ok = true;
    let mut per_component = Vec::new();
    for xc in [0.0, PI] {
        let ys: Vec<f64> = cat
            .orbits
            .iter()
            .filter(|o| o.orbit_points.iter().any(|p| wrap_difference(p.x - xc).abs() <= 1e-9))
            .map(|o| o.seed.y)
            .collect();
        let eq = same_set(ys.clone(), &fn12, 1e-10);
        ok &= eq;
        per_component.push(format!("x = {xc:.4}: {} orbits, set equal {eq}", ys.len()));
    }
    let all_y = same_set(cat.orbits.iter().map(|o| o.seed.y).collect(), &fn12, 1e-10);
    let max_res = cat.orbits.iter().map(|o| o.residual.max(o.symmetric_residual)).fold(0.0, f64::max);
    ok &= all_y && max_res <= 1e-10 && cat.orbits.len() == 2 * fn12.len();
    verdict(
        ok,
        format!(
            "|F_12| = {}, catalog {} orbits, {}; max residual {max_res:.1e}",
            fn12.len(),
            cat.orbits.len(),
            per_component.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. certificates and parity over every test map

fn criterion_6() -> Verdict {
    let res = Resolution::default();
    let maps: Vec<(MapSpec, u32)> = vec![
        (twist(Profile::linear(TWO_PI, 0.0), cyl01()).unwrap(), 12),
        (twist(Profile::linear(TWO_PI, 0.25), cyl01()).unwrap(), 8),
        (twist(Profile::linear(TWO_PI, 0.0), InvariantDomain::Strip).unwrap(), 6),
        (standard(), 14),
        (normalized_standard(2.0, -PI, PI).unwrap(), 8),
        (wavy_twist(Profile::linear(TWO_PI, 0.0), 0.3).unwrap(), 8),
        (rigid_disk_rotation(1.0), 8),
        (disk_twist_reflection(3.0, 0.2).unwrap(), 6),
        (disk_half_turn_reflection(Point::new(0.2, 0.1), 0.6, 2.0).unwrap(), 4),
    ];
    let mut refined = 0usize;
    let mut bad = Vec::new();
    let mut odd = 0usize;
    for (f, n) in &maps {
        let set = LineSet::new(f.clone(), res).unwrap();
        let raw = search(&set, *n, ORBIT_TOL).unwrap();
        for o in &raw.refined {
            refined += 1;
            let mixed = (o.witness.0 + o.witness.1) % 2 == 1;
            if !o.certified(1e-10) || (mixed && o.period % 2 == 0) {
                bad.push(format!("{} raw {:?} period {}", f.name, o.witness, o.period));
            }
        }
        let cat = find_symmetric_periodic_points(f, *n, &res).unwrap();
        for o in &cat.orbits {
            let mixed = (o.witness.0 + o.witness.1) % 2 == 1;
            odd += usize::from(o.period % 2 == 1);
            if mixed != (o.period % 2 == 1) || !o.certified(1e-10) {
                bad.push(format!("{} catalog {:?} period {}", f.name, o.witness, o.period));
            }
        }
    }
    verdict(
        bad.is_empty() && refined > 0 && odd > 0,
        format!(
            "{} maps, {refined} refined candidates, {odd} odd-period catalog orbits, {} violations{}",
            maps.len(),
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. boundary twist and the rotation spectrum

fn criterion_7() -> Verdict {
    let lift = LiftedMap::new(twist(Profile::linear(TWO_PI, 0.25), cyl01()).unwrap()).unwrap();
    let b = boundary_twist(&lift);
    let ends = (b.lower + PI / 2.0).abs() <= 1e-12 && (b.upper - 1.5 * PI).abs() <= 1e-12;
    let s = farey_orbit_spectrum(&lift, 6).unwrap();
    // -1/4 < p/q < 3/4 in integers
    let mut oracle = Vec::new();
    for q in 1..=6i64 {
        for p in -q..=q {
            let (mut a, mut c) = (p.abs(), q);
            while c != 0 {
                (a, c) = (c, a % c);
            }
            if a == 1 && -q < 4 * p && 4 * p < 3 * q {
                oracle.push((p, q as u32));
            }
        }
    }
    let mut got: Vec<(i64, u32)> = s.rationals.iter().map(|r| (r.p, r.q)).collect();
    got.sort();
    oracle.sort();
    let per_rational = s.rationals.iter().all(|r| {
        s.entries
            .iter()
            .filter(|e| e.rational == *r && e.orbit.as_ref().is_some_and(|o| o.certified(1e-10)))
            .count()
            == 2
    });
    let rot = s
        .entries
        .iter()
        .map(|e| e.rotation_number.map_or(f64::INFINITY, |x| (x - e.rational.value()).abs()))
        .fold(0.0, f64::max);
    let ok = b.satisfied && ends && got == oracle && per_rational && rot <= 1e-10 && s.falsification_candidates.is_empty();
    verdict(
        ok,
        format!(
            "interval [{:.15}, {:.15}], {} admissible rationals (oracle {}), {} certified orbits, max rotation error {rot:.1e}",
            b.lower,
            b.upper,
            got.len(),
            oracle.len(),
            s.orbits().count()
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. dichotomy census

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let res = Resolution::default();
    let free = dichotomy_census(&rigid_annulus_rotation(GOLDEN_ANGLE), 20, &res).unwrap();
    let zero = free.rows.iter().all(|r| r.count_all == 0 && r.count_odd == 0 && r.count_interior == 0);
    let c = dichotomy_census(&standard(), 14, &res).unwrap();
    let counts: Vec<usize> = c.rows.iter().map(|r| r.count_all).collect();
    let increasing = counts.windows(2).all(|w| w[1] > w[0]) && c.rows.first().map(|r| r.max_period) == Some(2);
    let odd = c.rows.iter().any(|r| r.count_odd >= 1);
    let el = t.elapsed();
    verdict(
        zero && increasing && odd && el < Duration::from_secs(300),
        format!("irrational rotation all zero {zero}; standard counts {counts:?}; odd present {odd}; {el:.2?}"),
    )
}

// ---------------------------------------------------------------------------
// 9. disk fixed points

fn criterion_9() -> Verdict {
    let res = Resolution::default();
    let maps: Vec<(MapSpec, Vec<Point>)> = vec![
        (rigid_disk_rotation(PI / 3.0), vec![Point::ORIGIN]),
        (rigid_disk_rotation(1.0), vec![Point::ORIGIN]),
        (
            disk_twist_reflection(3.0, 0.2).unwrap(),
            vec![Point::ORIGIN, Point::new(0.0, 0.2), Point::new(0.0, -0.2)],
        ),
        // T(0, y) is back on the axis when 5y² = π
        (
            disk_twist_reflection(5.0, 0.0).unwrap(),
            vec![Point::ORIGIN, Point::new(0.0, (PI / 5.0).sqrt()), Point::new(0.0, -(PI / 5.0).sqrt())],
        ),
        (disk_half_turn_reflection(Point::new(0.2, 0.1), 0.6, 2.0).unwrap(), vec![]),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    let mut reversed_route = false;
    for (f, oracle) in &maps {
        match disk_symmetric_fixed_point(f, &res) {
            Ok(r) => {
                let z = r.orbit.seed;
                let residual = (f.apply(z) - z).norm();
                let matches = oracle.is_empty() || oracle.iter().any(|q| (*q - z).norm() <= 1e-9);
                let good = residual <= 1e-10 && r.orbit.interior && z.x.abs() <= 1e-10 && matches;
                if !f.flags.orientation_preserving {
                    reversed_route = r.route == DiskRoute::PeriodTwo;
                    ok &= reversed_route;
                }
                ok &= good;
                lines.push(format!("{} -> {z} ({:?}, residual {residual:.1e})", f.name, r.route));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("{}: {e}", f.name));
            }
        }
    }
    verdict(ok && reversed_route, lines.join("; "))
}

// ---------------------------------------------------------------------------
// 10. negative controls

fn criterion_10() -> Verdict {
    let free = InvolutionSpec::new("(r, θ) -> (3 - r, θ + π)", InvariantDomain::ClosedAnnulus, true, |p: Point| {
        Point::new(p.x + PI, 3.0 - p.y)
    });
    let f = build_from_involution(&free).unwrap();
    let no_roots = matches!(base_lines(&f, &Resolution::default()), Err(SymmError::NoRoots { .. }));
    let rot = rigid_annulus_rotation(PI / 7.0);
    let report = twist_criterion(&rot, &Resolution::default()).unwrap();
    let fails = report.components.len() == 2 && report.components.iter().all(|v| !v.intersects && v.witness.is_none());
    let cat = find_symmetric_periodic_points(&rot, 1, &Resolution::default()).unwrap();
    let none = cat.orbits.is_empty();
    verdict(
        no_roots && fails && none,
        format!("free involution no roots {no_roots}; rotation criterion fails on both components {fails}; finder empty {none}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("reversibility and involution algebra", criterion_1),
        ("variation of angle calculus", criterion_2),
        ("mirror loop index", criterion_3),
        ("pushforward lines", criterion_4),
        ("twist oracle completeness", criterion_5),
        ("certificates and parity", criterion_6),
        ("boundary twist and spectrum", criterion_7),
        ("dichotomy census", criterion_8),
        ("disk symmetric fixed point", criterion_9),
        ("negative controls", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        failed += usize::from(!v.pass);
        println!(
            "criterion {:>2} {} [{}] {} ({:.2?})",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail,
            t.elapsed()
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
