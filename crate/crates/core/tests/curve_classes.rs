mod common;

use num_bigint::BigInt;
use num_rational::BigRational;

use common::{datum_fan, div, fixture, resolution};
use spherical::curve_classes::{
    color_orbit_class, color_orbit_class_eval, degree_from_weights, degree_type_u, effective_cone_generators,
    intersection_table, nef_via_curves, wall_class_eval, CurveKind, WeightDegreeInput,
};
use spherical::lattice_geom::{int_vec, rat_vec, walls};
use spherical::root_weyl::{build_root_system, Family};
use spherical::Error;

fn r(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[test]
fn line_in_the_plane() {
    let (d, f) = datum_fan(&fixture("p2_conic"));
    let c = color_orbit_class(&d, &f, "L", "Y").unwrap();
    assert_eq!(c.label(), "C[L,Y]");
    assert_eq!(c.eval(&d, &f, &div(&[("L", 1)])).unwrap(), r(1));
    assert_eq!(c.eval(&d, &f, &div(&[("conic", 1)])).unwrap(), r(2));
    assert_eq!(c.eval(&d, &f, &div(&[("L", 1), ("conic", 1)])).unwrap(), r(3));
}

#[test]
fn rulings_of_the_quadric() {
    let (d, f) = datum_fan(&fixture("p1xp1"));
    let cone = effective_cone_generators(&d, &f).unwrap();
    assert_eq!(cone.generators.len(), 2);
    let labels: Vec<String> = cone.quotient_basis.iter().map(|(_, c)| c.label()).collect();
    assert_eq!(labels, ["C[D+,Y]", "C[D-,Y]"]);
    let plus = color_orbit_class_eval;
    assert_eq!(plus(&d, &f, "D+", "Y", &div(&[("D+", 1)])).unwrap(), r(1));
    assert_eq!(plus(&d, &f, "D+", "Y", &div(&[("D-", 1)])).unwrap(), r(0));
    assert_eq!(plus(&d, &f, "D+", "Y", &div(&[("diag", 1)])).unwrap(), r(1));
}

#[test]
fn exceptional_curve_has_self_intersection_minus_one() {
    let doc = fixture("toric_p2");
    let res = resolution(&doc, "blowup");
    let (d, f) = (&res.datum, &res.fan);
    let ws = walls(f, &d.valuation_cone);
    assert_eq!(ws.len(), 4);
    let w = ws.iter().find(|w| w.face.contains(&int_vec(&[1, 1]))).unwrap();
    assert_eq!(wall_class_eval(d, f, w, &div(&[("E", 1)])).unwrap(), r(-1));
    assert_eq!(wall_class_eval(d, f, w, &div(&[("D1", 1)])).unwrap(), r(1));
    assert_eq!(wall_class_eval(d, f, &w.flipped(), &div(&[("E", 1)])).unwrap(), r(-1));
    assert!(!nef_via_curves(d, f, &div(&[("E", 1)])).unwrap());
    assert!(nef_via_curves(d, f, &div(&[("D1", 1), ("E", 1)])).unwrap());
}

#[test]
fn lines_in_toric_plane() {
    let (d, f) = datum_fan(&fixture("toric_p2"));
    for w in walls(&f, &d.valuation_cone) {
        for id in ["D1", "D2", "D3"] {
            assert_eq!(wall_class_eval(&d, &f, &w, &div(&[(id, 1)])).unwrap(), r(1));
        }
    }
}

#[test]
fn undefined_and_unknown_classes() {
    let (d, f) = datum_fan(&fixture("ig_2"));
    assert!(matches!(color_orbit_class(&d, &f, "DY", "Y"), Err(Error::UndefinedClass(_))));
    assert!(color_orbit_class(&d, &f, "DZ", "Y").is_ok());
    assert!(color_orbit_class(&d, &f, "XX", "Y").is_err());
    assert!(color_orbit_class(&d, &f, "DZ", "W").is_err());
    let (d, f) = datum_fan(&fixture("toric_a2"));
    assert!(matches!(effective_cone_generators(&d, &f), Err(Error::NotComplete)));
}

#[test]
fn ig_colors_are_numerically_equivalent() {
    let (d, f) = datum_fan(&fixture("ig_3"));
    let cone = effective_cone_generators(&d, &f).unwrap();
    assert!(cone.quotient_basis.is_empty());
    assert!(cone.generators.iter().any(|c| matches!(c.kind, CurveKind::Wall(_))));
    for c in &cone.generators {
        assert_eq!(c.eval(&d, &f, &div(&[("DY", 1)])).unwrap(), c.eval(&d, &f, &div(&[("DZ", 1)])).unwrap());
    }
}

#[test]
fn intersection_table_shape() {
    let doc = fixture("toric_p1xp1");
    let (d, f) = datum_fan(&doc);
    let divs: Vec<_> = doc.divisors.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let (rows, table) = intersection_table(&d, &f, &divs).unwrap();
    assert_eq!(rows.len(), table.len());
    assert!(table.iter().all(|r| r.len() == divs.len()));
}

#[test]
fn non_cartier_divisors_have_no_intersection_numbers() {
    let (d, f) = datum_fan(&fixture("toric_twisted_prism"));
    let ids = d.divisor_ids();
    let bad = ids.iter().map(|i| div(&[(i, 1)])).find(|x| nef_via_curves(&d, &f, x).is_err());
    assert!(matches!(bad.map(|x| nef_via_curves(&d, &f, &x)), Some(Err(Error::NotCartier(_)))));
}

#[test]
fn degrees_from_weights() {
    let inp = WeightDegreeInput { l_x: int_vec(&[3, 1]), l_y: int_vec(&[-1, -1]), chi: int_vec(&[2, 1]) };
    assert_eq!(degree_from_weights(&inp).unwrap(), r(2));
    let inp = WeightDegreeInput { l_x: int_vec(&[3, 0]), l_y: int_vec(&[0, 0]), chi: int_vec(&[2, 0]) };
    assert_eq!(degree_from_weights(&inp).unwrap(), BigRational::new(3.into(), 2.into()));
    let inp = WeightDegreeInput { l_x: int_vec(&[1, 1]), l_y: int_vec(&[0, 0]), chi: int_vec(&[1, 0]) };
    assert!(matches!(degree_from_weights(&inp), Err(Error::NotProportional)));
    let inp = WeightDegreeInput { l_x: int_vec(&[1]), l_y: int_vec(&[0]), chi: int_vec(&[0]) };
    assert!(matches!(degree_from_weights(&inp), Err(Error::NotProportional)));
}

#[test]
fn degree_of_type_u_curves() {
    let rs = build_root_system(Family::A, 2).unwrap();
    assert_eq!(degree_type_u(&rs, 0, &rat_vec(&[1, 0, 0])).unwrap(), BigInt::from(1));
    assert_eq!(degree_type_u(&rs, 1, &rat_vec(&[1, 0, 0])).unwrap(), BigInt::from(0));
    assert_eq!(degree_type_u(&rs, 0, &rat_vec(&[2, -1, 0])).unwrap(), BigInt::from(3));
    assert!(degree_type_u(&rs, 2, &rat_vec(&[1, 0, 0])).is_err());
    assert!(matches!(degree_type_u(&rs, 0, &rat_vec(&[1, 0])), Err(Error::RankMismatch { .. })));
}
