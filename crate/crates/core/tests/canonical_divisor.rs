mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use common::{complete_embeddings, datum_fan, div, fixture, resolution};
use spherical::canonical_divisor::{
    anticanonical_prototype, anticanonical_toroidal, canonical_general, color_coefficient, pushforward_divisor,
    FanMap, Resolution,
};
use spherical::divisor_theory::{divisor_set, is_smooth_toroidal, DivisorZ};
use spherical::Error;

#[test]
fn plane_blowup_pushes_forward_to_the_plane() {
    let doc = fixture("toric_p2");
    let (d, _) = datum_fan(&doc);
    let res = resolution(&doc, "blowup");
    assert_eq!(res.map.exceptional(), ["E"]);
    let kt = anticanonical_toroidal(&res.datum, &res.fan).unwrap();
    assert_eq!(kt, div(&[("D1", 1), ("D2", 1), ("D3", 1), ("E", 1)]));
    assert_eq!(canonical_general(&d, &res).unwrap(), div(&[("D1", 1), ("D2", 1), ("D3", 1)]));
}

#[test]
fn incomplete_resolution_is_rejected() {
    let doc = fixture("toric_a2");
    let (d, _) = datum_fan(&doc);
    let res = resolution(&doc, "blowup");
    assert!(matches!(canonical_general(&d, &res), Err(Error::BadResolution(_))));
    let e = pushforward_divisor(&res.map, &div(&[("E", 3), ("D1", 1)])).unwrap();
    assert_eq!(e, div(&[("D1", 1)]));
}

#[test]
fn singular_resolution_is_rejected() {
    let (d, f) = datum_fan(&fixture("toric_twisted_prism"));
    let res = Resolution::identity(&d, &f);
    assert!(matches!(canonical_general(&d, &res), Err(Error::BadResolution(_))));
}

#[test]
fn identity_resolution_of_smooth_toroidal_embeddings() {
    for (name, d, f, _) in complete_embeddings() {
        if !divisor_set(&d, &f).toroidal || !is_smooth_toroidal(&d, &f).unwrap() {
            continue;
        }
        let res = Resolution::identity(&d, &f);
        assert_eq!(canonical_general(&d, &res).unwrap(), anticanonical_toroidal(&d, &f).unwrap(), "{name}");
    }
}

#[test]
fn anticanonical_needs_toroidal_and_complete() {
    let (d, f) = datum_fan(&fixture("ig_2"));
    assert!(matches!(anticanonical_toroidal(&d, &f), Err(Error::NotToroidal)));
    let (d, f) = datum_fan(&fixture("toric_a2"));
    assert!(matches!(anticanonical_toroidal(&d, &f), Err(Error::NotComplete)));
}

#[test]
fn color_coefficients() {
    let (d, _) = datum_fan(&fixture("p1xp1"));
    assert_eq!(color_coefficient(&d, d.color("D+").unwrap()).unwrap(), BigInt::from(1));
    let (d, _) = datum_fan(&fixture("p2_conic"));
    assert_eq!(color_coefficient(&d, d.color("L").unwrap()).unwrap(), BigInt::from(1));
    for n in 2..=5 {
        let (d, _) = datum_fan(&fixture(&format!("ig_{n}")));
        assert_eq!(color_coefficient(&d, d.color("DY").unwrap()).unwrap(), BigInt::from(2 * n - 2));
        assert_eq!(color_coefficient(&d, d.color("DZ").unwrap()).unwrap(), BigInt::from(2));
    }
}

#[test]
fn prototype_matches_explicit_formula() {
    for (name, d, f, _) in complete_embeddings() {
        let proto = anticanonical_prototype(&d);
        if let Ok(k) = anticanonical_toroidal(&d, &f) {
            assert!(proto.matches(&k), "{name}");
        }
        if let Some(u) = proto.unknowns.first() {
            assert!(!proto.matches(&proto.fixed.add(&div(&[(u, -1)]))), "{name}");
        }
    }
    let (d, _) = datum_fan(&fixture("p1xp1"));
    assert_eq!(anticanonical_prototype(&d).to_string(), "diag + a[D+]*D+ + a[D-]*D-");
}

#[test]
fn fan_map_validation() {
    let doc = fixture("toric_p2");
    let (d, _) = datum_fan(&doc);
    let res = resolution(&doc, "blowup");
    let mut m = res.map.clone();
    m.ray_image.remove("E");
    assert!(matches!(m.validate(&res.datum, &d), Err(Error::BadResolution(_))));
    let mut m = res.map.clone();
    m.ray_image.insert("E".to_string(), Some("nowhere".to_string()));
    assert!(m.validate(&res.datum, &d).is_err());

    let doc = fixture("p1xp1");
    let (d, _) = datum_fan(&doc);
    let mut m = FanMap::identity(&d);
    m.color_image.insert("D-".to_string(), "D+".to_string());
    assert!(matches!(m.validate(&d, &d), Err(Error::BadResolution(_))));
}

#[test]
fn composition_with_identity() {
    let doc = fixture("toric_p2");
    let (d, _) = datum_fan(&doc);
    let res = resolution(&doc, "blowup");
    let id = FanMap::identity(&d);
    assert_eq!(res.map.compose(&id).unwrap(), res.map);
    let twice = FanMap::identity(&res.datum).compose(&res.map).unwrap();
    assert_eq!(twice, res.map);
    let contract_all = FanMap { ray_image: BTreeMap::from([("D1".to_string(), None)]), color_image: BTreeMap::new() };
    assert!(res.map.compose(&contract_all).is_err());
}

proptest! {
    #[test]
    fn pushforward_is_linear(a in prop::collection::vec(-5i64..=5, 4), b in prop::collection::vec(-5i64..=5, 4)) {
        let doc = fixture("toric_p2");
        let res = resolution(&doc, "blowup");
        let ids = ["D1", "D2", "D3", "E"];
        let mk = |c: &[i64]| div(&ids.iter().zip(c).map(|(i, x)| (*i, *x)).collect::<Vec<_>>());
        let (x, y) = (mk(&a), mk(&b));
        let px = pushforward_divisor(&res.map, &x).unwrap();
        let py = pushforward_divisor(&res.map, &y).unwrap();
        prop_assert_eq!(pushforward_divisor(&res.map, &x.add(&y)).unwrap(), px.add(&py));
        prop_assert_eq!(px.get("E"), BigInt::from(0));
        prop_assert!(pushforward_divisor(&res.map, &DivisorZ::zero()).unwrap().is_zero());
    }
}
