mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use common::{complete_embeddings, datum_fan, div, fixture};
use spherical::divisor_theory::{
    affine_witness, cartier_data, class_group, divisor_set, factoriality, is_affine_criterion, is_ample, is_cartier,
    is_globally_generated, is_quasi_projective, is_smooth_toroidal, pairing, picard_group, picard_group_direct,
    DivisorZ, Factoriality, SphericalDatum,
};
use spherical::lattice_geom::{int_vec, Cone};
use spherical::Error;

fn random_divisor(datum: &SphericalDatum, coeffs: &[i64]) -> DivisorZ {
    let mut d = DivisorZ::zero();
    for (id, c) in datum.divisor_ids().iter().zip(coeffs.iter().cycle()) {
        d.set(id, BigInt::from(*c));
    }
    d
}

/// Bidegree on `P¹ × P¹`.
fn bidegree(d: &DivisorZ) -> (BigInt, BigInt) {
    (d.get("D+") + d.get("diag"), d.get("D-") + d.get("diag"))
}

proptest! {
    #[test]
    fn p1xp1_classes_are_bidegrees(a in prop::collection::vec(-4i64..=4, 3), b in prop::collection::vec(-4i64..=4, 3)) {
        let doc = fixture("p1xp1");
        let (datum, fan) = datum_fan(&doc);
        let (_, cmap) = class_group(&datum);
        let (x, y) = (random_divisor(&datum, &a), random_divisor(&datum, &b));
        prop_assert_eq!(cmap.linearly_equivalent(&x, &y), bidegree(&x) == bidegree(&y));
        let (p, q) = bidegree(&x);
        let zero = BigInt::from(0);
        prop_assert_eq!(is_ample(&datum, &fan, &x).unwrap(), p > zero && q > zero);
        prop_assert_eq!(is_globally_generated(&datum, &fan, &x).unwrap(), p >= zero && q >= zero);
    }

    #[test]
    fn principal_divisors_are_trivial(chi in prop::collection::vec(-5i64..=5, 3), which in 0usize..100) {
        let all = complete_embeddings();
        let (name, datum, fan, _) = &all[which % all.len()];
        let chi = int_vec(&chi[..datum.rank]);
        let p = datum.principal_divisor(&chi);
        let (_, cmap) = class_group(datum);
        prop_assert!(cmap.linearly_equivalent(&p, &DivisorZ::zero()), "{}", name);
        let l = cartier_data(datum, fan, &p).unwrap();
        for chi_y in l.per_cone.values() {
            prop_assert_eq!(chi_y, &chi);
        }
        let pic = picard_group(datum, fan).unwrap();
        prop_assert!(pic.class_of(datum, fan, &p).unwrap().iter().all(|c| *c == BigInt::from(0)));
    }

    #[test]
    fn cartier_data_shifts_by_principal_divisors(
        c in prop::collection::vec(-3i64..=3, 6),
        chi in prop::collection::vec(-3i64..=3, 3),
        which in 0usize..100,
    ) {
        let all = complete_embeddings();
        let (_, datum, fan, _) = &all[which % all.len()];
        let d = random_divisor(datum, &c);
        let chi = int_vec(&chi[..datum.rank]);
        if let Ok(l) = cartier_data(datum, fan, &d) {
            let l2 = cartier_data(datum, fan, &d.add(&datum.principal_divisor(&chi))).unwrap();
            prop_assert_eq!(l2, l.shifted(&chi));
        } else {
            prop_assert!(!is_cartier(datum, fan, &d.add(&datum.principal_divisor(&chi))).unwrap());
        }
    }

    #[test]
    fn picard_classes_embed_into_class_group(
        a in prop::collection::vec(-3i64..=3, 6),
        b in prop::collection::vec(-3i64..=3, 6),
        which in 0usize..100,
    ) {
        let all = complete_embeddings();
        let (name, datum, fan, _) = &all[which % all.len()];
        let (x, y) = (random_divisor(datum, &a), random_divisor(datum, &b));
        if is_cartier(datum, fan, &x).unwrap() && is_cartier(datum, fan, &y).unwrap() {
            let pic = picard_group(datum, fan).unwrap();
            let (_, cmap) = class_group(datum);
            let same_pic = pic.class_of(datum, fan, &x).unwrap() == pic.class_of(datum, fan, &y).unwrap();
            prop_assert_eq!(same_pic, cmap.linearly_equivalent(&x, &y), "{}", name);
        }
    }
}

#[test]
fn picard_assembly_agrees_with_direct_quotient() {
    let mut names: Vec<_> = complete_embeddings().into_iter().map(|(n, d, f, _)| (n, d, f)).collect();
    for extra in ["toric_a2", "toric_quadric_cone", "toric_square_cone"] {
        let (d, f) = datum_fan(&fixture(extra));
        names.push((extra.to_string(), d, f));
    }
    for (name, d, f) in names {
        let pic = picard_group(&d, &f).unwrap();
        let (direct, _) = picard_group_direct(&d, &f);
        assert_eq!(pic.group.free_rank, direct.free_rank, "{name}");
        assert_eq!(pic.group.torsion, direct.torsion, "{name}");
    }
}

#[test]
fn class_groups_of_examples() {
    let cases = [
        ("p1xp1", "Z^2"),
        ("p2_conic", "Z"),
        ("toric_p1", "Z"),
        ("toric_p2", "Z"),
        ("toric_p1xp1", "Z^2"),
        ("toric_a2", "0"),
        ("toric_quadric_cone", "Z/2"),
        ("ig_3", "Z"),
    ];
    for (name, want) in cases {
        let (d, _) = datum_fan(&fixture(name));
        assert_eq!(class_group(&d).0.to_string(), want, "{name}");
    }
    let (d, _) = datum_fan(&fixture("p2_conic"));
    let (cl, cmap) = class_group(&d);
    assert_eq!(cmap.class_of(&div(&[("conic", 1)])), cmap.class_of(&div(&[("L", 2)])));
    assert_eq!(cl.class_of["conic"], int_vec(&[2]));
}

#[test]
fn non_cartier_divisors_are_reported() {
    let (d, f) = datum_fan(&fixture("toric_quadric_cone"));
    let e = cartier_data(&d, &f, &div(&[("D1", 1)])).unwrap_err();
    assert!(matches!(e, Error::NotCartier(ref c) if c == "s"));
    assert!(is_cartier(&d, &f, &div(&[("D1", 2)])).unwrap());
    assert!(d.check_divisor(&div(&[("nope", 1)])).is_err());
}

#[test]
fn positivity_needs_completeness() {
    let (d, f) = datum_fan(&fixture("toric_a2"));
    assert!(matches!(is_ample(&d, &f, &div(&[])), Err(Error::NotComplete)));
    assert!(matches!(is_globally_generated(&d, &f, &div(&[])), Err(Error::NotComplete)));
}

#[test]
fn p2_positivity_by_degree() {
    let (d, f) = datum_fan(&fixture("p2_conic"));
    for (l, c) in [(1, 0), (0, 1), (-1, 1), (-2, 1), (0, 0), (3, -1), (-1, 0)] {
        let x = div(&[("L", l), ("conic", c)]);
        let deg = l + 2 * c;
        assert_eq!(is_ample(&d, &f, &x).unwrap(), deg > 0, "{x}");
        assert_eq!(is_globally_generated(&d, &f, &x).unwrap(), deg >= 0, "{x}");
    }
}

#[test]
fn factoriality_and_smoothness() {
    let cases = [
        ("toric_quadric_cone", Factoriality::QFactorial),
        ("toric_square_cone", Factoriality::Neither),
        ("toric_twisted_prism", Factoriality::QFactorial),
        ("toric_p2", Factoriality::Factorial),
        ("p1xp1", Factoriality::Factorial),
    ];
    for (name, want) in cases {
        let (d, f) = datum_fan(&fixture(name));
        let (v, w) = factoriality(&d, &f);
        assert_eq!(v, want, "{name}");
        assert_eq!(w.is_none(), want == Factoriality::Factorial, "{name}");
        assert_eq!(is_smooth_toroidal(&d, &f).unwrap(), want == Factoriality::Factorial, "{name}");
    }
    let (d, f) = datum_fan(&fixture("ig_2"));
    assert!(!divisor_set(&d, &f).toroidal);
    assert!(matches!(is_smooth_toroidal(&d, &f), Err(Error::NotToroidal)));
    assert_eq!(Factoriality::QFactorial.to_string(), "Q-factorial");
}

#[test]
fn affineness() {
    for (name, affine) in [("toric_a2", true), ("toric_quadric_cone", true), ("toric_p2", false), ("p1xp1", false)] {
        let (d, f) = datum_fan(&fixture(name));
        assert_eq!(is_affine_criterion(&d, &f), affine, "{name}");
    }
    let (d, f) = datum_fan(&fixture("toric_quadric_cone"));
    let w = affine_witness(&d, &f).unwrap();
    for u in f.cone("s").unwrap().cone.rays() {
        assert_eq!(pairing(u, &w), BigInt::from(0));
    }
}

#[test]
fn quasi_projectivity() {
    for (name, qp) in [("toric_twisted_prism", false), ("toric_p2", true), ("p1xp1", true), ("ig_4", true), ("toric_a2", true)] {
        let (d, f) = datum_fan(&fixture(name));
        assert_eq!(is_quasi_projective(&d, &f), qp, "{name}");
    }
}

#[test]
fn datum_validation() {
    let empty = SphericalDatum::new(2, Cone::full(2), Vec::new(), Vec::new(), None);
    assert!(empty.is_ok());
    let rays = vec![("a".to_string(), int_vec(&[1, 0, 0]))];
    assert!(SphericalDatum::toric(2, rays).is_err());
    let dup = vec![("a".to_string(), int_vec(&[1, 0])), ("a".to_string(), int_vec(&[0, 1]))];
    assert!(SphericalDatum::toric(2, dup).is_err());
}

#[test]
fn divisor_arithmetic_and_rendering() {
    let a = div(&[("D1", 2), ("D2", 1)]);
    let b = div(&[("D2", 1), ("E", 1)]);
    let order: Vec<String> = ["D1", "D2", "E"].iter().map(|s| s.to_string()).collect();
    assert_eq!(a.sub(&b).render(&order), "2*D1 - E");
    assert_eq!(a.add(&b).render(&order), "2*D1 + 2*D2 + E");
    assert_eq!(a.scale(&BigInt::from(-1)).render(&order), "-2*D1 - D2");
    assert!(a.sub(&a).is_zero());
    assert_eq!(DivisorZ::zero().render(&order), "0");
    assert_eq!(a.vector(&order), int_vec(&[2, 1, 0]));
}
