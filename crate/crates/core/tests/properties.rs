use std::f64::consts::PI;

use proptest::prelude::*;

use revsym_core::domains::{wrap_angle, wrap_difference, InvariantDomain, Point, TWO_PI};
use revsym_core::families::{normalized_standard, twist, wavy_twist, Profile};
use revsym_core::harness::{admissible_rationals, rationalize, LiftedMap, Rational};
use revsym_core::revmaps::{validate_inverse, validate_reversibility, TOL_REVERSIBILITY};
use revsym_core::symmlines::{
    certify, dedupe_orbits, find_symmetric_periodic_points, line_residual, symmetry_line, Resolution,
    DEDUPE_EPS, ORBIT_TOL,
};
use revsym_core::winding::{angle_variation, mirror_index_check, Polyline};

fn domain() -> impl Strategy<Value = InvariantDomain> {
    prop_oneof![
        Just(InvariantDomain::ClosedAnnulus),
        Just(InvariantDomain::OpenAnnulus),
        Just(InvariantDomain::Strip),
        Just(InvariantDomain::ClosedDisk),
        Just(InvariantDomain::OpenDisk),
        Just(InvariantDomain::Cylinder { y_min: -1.0, y_max: 2.0 }),
        Just(InvariantDomain::Plane { extent: 3.0 }),
    ]
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn loop_around(c: Point, r: f64, wobble: f64, n: usize) -> Polyline {
    let pts = (0..n)
        .map(|i| {
            let t = TWO_PI * i as f64 / n as f64;
            let rr = r * (1.0 + wobble * (3.0 * t).sin());
            c + Point::new(rr * t.cos(), rr * t.sin())
        })
        .collect();
    Polyline::new(pts, true).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_is_an_involution(d in domain(), i in 1usize..500) {
        let p = d.halton_samples(i)[i - 1];
        prop_assert!(d.contains(p));
        let q = d.reflect(d.reflect(p).unwrap()).unwrap();
        prop_assert!(d.distance(p, q) < 1e-14);
        prop_assert_eq!(d.canonical(d.canonical(p)), d.canonical(p));
    }

    #[test]
    fn wrapping_ranges(x in -1e3f64..1e3) {
        let a = wrap_angle(x);
        prop_assert!((0.0..TWO_PI).contains(&a));
        let w = wrap_difference(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((x - w) / TWO_PI - ((x - w) / TWO_PI).round()).abs() < 1e-9);
    }

    #[test]
    fn standard_family_is_reversible(k in 0.0f64..3.5) {
        let f = normalized_standard(k, -PI, PI).unwrap();
        prop_assert!(validate_reversibility(&f, 500, TOL_REVERSIBILITY).pass);
        prop_assert!(validate_inverse(&f, 500, TOL_REVERSIBILITY).pass);
    }

    #[test]
    fn wavy_twist_is_reversible(c in 0.0f64..0.45, shift in 0.0f64..1.0) {
        let f = wavy_twist(Profile::linear(TWO_PI, shift), c).unwrap();
        prop_assert!(validate_reversibility(&f, 300, TOL_REVERSIBILITY).pass);
    }

    #[test]
    fn pushforward_lines_stay_on_their_fixed_sets(k in 0.0f64..1.5, m in 0u32..7) {
        let f = normalized_standard(k, -PI, PI).unwrap();
        let line = symmetry_line(&f, m, &Resolution::default()).unwrap();
        prop_assert!(line.certified);
        for b in &line.branches {
            for &p in b.points.iter().step_by(7) {
                prop_assert!(line_residual(&f, m, p) <= 1e-8);
            }
        }
    }

    #[test]
    fn reversal_and_reflection_negate(cx in -1.0f64..1.0, cy in -1.0f64..1.0, r in 0.1f64..1.0, w in 0.0f64..0.5) {
        let g = loop_around(Point::new(cx, cy), r, w, 64);
        let d = Polyline::constant(Point::ORIGIN);
        let Ok(v) = angle_variation(&d, &g) else { return Ok(()) };
        prop_assert!(v.is_integer_certified);
        let rv = angle_variation(&d.reversed(), &g.reversed()).unwrap();
        let fl = angle_variation(&d.reflected(), &g.reflected()).unwrap();
        prop_assert_eq!(rv.rounded(), v.rounded().map(|i| -i));
        prop_assert_eq!(fl.rounded(), v.rounded().map(|i| -i));
        let inside = Point::new(cx, cy).norm() < r * (1.0 - w);
        if inside {
            prop_assert_eq!(v.rounded(), Some(1));
        }
    }

    #[test]
    fn mirror_loops_agree_for_the_standard_family(k in 0.1f64..2.0, cx in 0.0f64..TWO_PI, cy in -1.5f64..1.5, r in 0.2f64..1.0) {
        let f = normalized_standard(k, -PI, PI).unwrap();
        let lp = loop_around(Point::new(cx, cy), r, 0.1, 96);
        if let Ok((a, b)) = mirror_index_check(&f, &lp) {
            prop_assert!(a.is_integer_certified && b.is_integer_certified);
            prop_assert_eq!(a.rounded(), b.rounded());
        }
    }

    #[test]
    fn rationalize_recovers_reduced_fractions(p in -60i64..60, q in 1u32..60, noise in -1e-12f64..1e-12) {
        let g = gcd(p, q as i64);
        let r = Rational { p: p / g, q: q / g as u32 };
        prop_assert_eq!(rationalize(r.value() + noise, 60), Some(r));
    }

    #[test]
    fn admissible_rationals_match_brute_force(lo in -3.0f64..1.0, width in 0.1f64..6.0, q_max in 1u32..9) {
        let hi = lo + width;
        let got = admissible_rationals(lo, hi, q_max);
        let mut want = Vec::new();
        for q in 1..=q_max as i64 {
            for p in -10 * q..=10 * q {
                let w = TWO_PI * p as f64 / q as f64;
                if gcd(p, q) == 1 && lo < w && w < hi {
                    want.push(Rational { p, q: q as u32 });
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn lift_equivariance_of_band_twists(shift in -1.0f64..1.0, slope in 0.5f64..8.0) {
        let f = twist(Profile::linear(slope, shift), InvariantDomain::cylinder(0.0, 1.0).unwrap()).unwrap();
        let lift = LiftedMap::new(f).unwrap();
        prop_assert!(lift.equivariance_residual <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn twist_catalog_counts_follow_farey(n in 1u32..10) {
        let f = twist(Profile::linear(TWO_PI, 0.0), InvariantDomain::cylinder(0.0, 1.0).unwrap()).unwrap();
        let cat = find_symmetric_periodic_points(&f, n, &Resolution::default()).unwrap();
        let farey = (1..=n as i64).map(|q| (0..=q).filter(|&p| gcd(p, q) == 1).count()).sum::<usize>();
        prop_assert_eq!(cat.orbits.len(), 2 * farey);
        for o in &cat.orbits {
            prop_assert!(o.certified(ORBIT_TOL));
            prop_assert!(o.period <= n);
        }
    }

    #[test]
    fn dedupe_is_idempotent(k in 0.2f64..1.5, n in 2u32..8) {
        let f = normalized_standard(k, -PI, PI).unwrap();
        let cat = find_symmetric_periodic_points(&f, n, &Resolution::default()).unwrap();
        let again = dedupe_orbits(&f.domain, cat.orbits.clone(), DEDUPE_EPS);
        prop_assert_eq!(again, cat.orbits.clone());
        // every listed point is a symmetric periodic point of the stated period
        for o in &cat.orbits {
            let c = certify(&f, o.seed, o.period, o.witness, ORBIT_TOL).unwrap();
            prop_assert_eq!(c.period, o.period);
        }
    }
}
