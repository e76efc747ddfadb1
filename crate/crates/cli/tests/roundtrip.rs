use proptest::prelude::*;

use revsym_cli::output::{to_json, MapDescription, OrbitCatalogDocument, SCHEMA_VERSION, TOOL_VERSION};
use revsym_core::families::ParamValue;
use revsym_core::symmlines::{Parity, SymmetricOrbit};
use revsym_core::{InvariantDomain, MapFlags, Point};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -10.0f64..10.0,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

fn point() -> impl Strategy<Value = Point> {
    (finite(), finite()).prop_map(|(x, y)| Point::new(x, y))
}

fn orbit() -> impl Strategy<Value = SymmetricOrbit> {
    (
        point(),
        1u32..40,
        (0u32..80, 0u32..80),
        (finite(), finite()),
        0u32..40,
        any::<bool>(),
        prop::collection::vec(point(), 0..6),
    )
        .prop_map(|(seed, period, witness, (r, s), step, interior, orbit_points)| SymmetricOrbit {
            seed,
            period,
            witness,
            parity: Parity::of(witness.0 + witness.1),
            residual: r.abs(),
            symmetric_residual: s.abs(),
            symmetric_step: step,
            interior,
            orbit_points,
        })
}

fn domain() -> impl Strategy<Value = InvariantDomain> {
    prop_oneof![
        Just(InvariantDomain::ClosedAnnulus),
        Just(InvariantDomain::ClosedDisk),
        Just(InvariantDomain::Strip),
        (finite(), finite()).prop_map(|(a, b)| InvariantDomain::Cylinder { y_min: a.min(b), y_max: a.max(b) }),
        finite().prop_map(|e| InvariantDomain::Plane { extent: e.abs() }),
    ]
}

fn document() -> impl Strategy<Value = OrbitCatalogDocument> {
    (
        prop::collection::vec(orbit(), 0..8),
        prop::collection::vec(point(), 0..3),
        domain(),
        finite(),
        "[a-z ]{0,12}",
        any::<u64>(),
        any::<bool>(),
    )
        .prop_map(|(orbits, tangencies, domain, k, warning, seed, degenerate)| {
            let mut params = std::collections::BTreeMap::new();
            params.insert("k".to_string(), ParamValue::Number(k));
            params.insert("a".to_string(), ParamValue::Text("2*pi*y".into()));
            OrbitCatalogDocument {
                schema_version: SCHEMA_VERSION,
                tool_version: TOOL_VERSION.into(),
                command: "orbits".into(),
                seed,
                map: MapDescription {
                    name: "test map".into(),
                    family: Some("normalized_standard".into()),
                    params,
                    forward: None,
                    inverse: None,
                    involution: None,
                    flags: MapFlags::SYMPLECTIC,
                },
                domain,
                max_period: 40,
                degenerate,
                orbits,
                tangencies,
                disk_fixed_point: None,
                warnings: vec![warning],
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_after_emit_is_identity(doc in document()) {
        let text = to_json(&doc);
        let back = OrbitCatalogDocument::parse(&text).unwrap();
        // bitwise, so -0.0 and subnormals count
        prop_assert_eq!(to_json(&back), text);
        for (a, b) in doc.orbits.iter().zip(&back.orbits) {
            prop_assert_eq!(a.seed.x.to_bits(), b.seed.x.to_bits());
            prop_assert_eq!(a.seed.y.to_bits(), b.seed.y.to_bits());
        }
        prop_assert_eq!(back, doc);
    }
}
