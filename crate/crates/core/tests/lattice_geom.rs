mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::{datum_fan, fixture};
use spherical::divisor_theory::SphericalDatum;
use spherical::lattice_geom::feasibility::{all_hold, feasible_fm, feasible_simplex, Constraint, Relation};
use spherical::lattice_geom::matrix::{int_kernel, int_solve, rank, smith, Cokernel, IntMat};
use spherical::lattice_geom::{
    cone_from_rays, cone_membership, fan_validate, int_vec, rat_vec, walls, ColoredFan, Cone, ConeSpec, Membership,
};
use spherical::Error;

fn mat(rows: &[Vec<i64>], cols: usize) -> IntMat {
    let r: Vec<Vec<BigInt>> = rows.iter().map(|r| int_vec(r)).collect();
    IntMat::from_rows(&r, cols)
}

fn is_unimodular(m: &IntMat) -> bool {
    let s = smith(m);
    s.rank() == m.rows && s.diag.iter().all(|d| d.is_one())
}

/// `v ∈ cone(rays)` iff `Σ λ_i r_i = t v` has a solution with `λ ≥ 0`, `t > 0`.
fn membership_oracle(rays: &[Vec<i64>], v: &[i64]) -> bool {
    let n = rays.len() + 1;
    let mut cs = Vec::new();
    for k in 0..v.len() {
        let mut row: Vec<i64> = rays.iter().map(|r| r[k]).collect();
        row.push(-v[k]);
        cs.push(Constraint::new(rat_vec(&row), Relation::Eq));
    }
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        cs.push(Constraint::new(rat_vec(&e), if i + 1 == n { Relation::Gt } else { Relation::Ge }));
    }
    feasible_fm(n, &cs).is_some()
}

fn small_matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| (prop::collection::vec(prop::collection::vec(-6i64..=6, c), r), Just(c)))
}

proptest! {
    #[test]
    fn smith_form_is_a_valid_decomposition((rows, cols) in small_matrix()) {
        let a = mat(&rows, cols);
        let s = smith(&a);
        prop_assert!(is_unimodular(&s.u));
        prop_assert!(is_unimodular(&s.v));
        let d = s.u.mul(&a).mul(&s.v);
        for i in 0..d.rows {
            for j in 0..d.cols {
                let want = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&d.row(i)[j], &want);
            }
        }
        for w in s.diag.windows(2) {
            prop_assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(s.rank(), rank(&a));
    }

    #[test]
    fn kernel_has_full_rank_and_is_killed((rows, cols) in small_matrix()) {
        let a = mat(&rows, cols);
        let k = int_kernel(&a);
        prop_assert_eq!(k.len(), cols - rank(&a));
        for v in &k {
            prop_assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn int_solve_finds_preimages((rows, cols) in small_matrix(), x in prop::collection::vec(-4i64..=4, 4)) {
        let a = mat(&rows, cols);
        let b = a.mul_vec(&int_vec(&x[..cols]));
        let y = int_solve(&a, &b).expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y), b);
    }

    #[test]
    fn cokernel_kills_the_image((rows, cols) in small_matrix(), x in prop::collection::vec(-4i64..=4, 4)) {
        let a = mat(&rows, cols);
        let c = Cokernel::of(&a);
        prop_assert!(c.is_zero_class(&a.mul_vec(&int_vec(&x[..cols]))));
        prop_assert_eq!(c.free_rank, rows.len() - rank(&a));
    }

    #[test]
    fn cone_membership_matches_lp_oracle(
        rays in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..5),
        v in prop::collection::vec(-3i64..=3, 3),
    ) {
        let int_rays: Vec<Vec<BigInt>> = rays.iter().map(|r| int_vec(r)).collect();
        let c = Cone::from_int_rays(&int_rays, 3).unwrap();
        prop_assert_eq!(c.contains(&int_vec(&v)), membership_oracle(&rays, &v));
        let q: Vec<Vec<BigRational>> = rays.iter().map(|r| rat_vec(r)).collect();
        let c2 = cone_from_rays(&q, 3).unwrap();
        prop_assert!(c2.same_as(&c));
        prop_assert_eq!(cone_membership(&c2, &rat_vec(&v), Membership::Boundary).unwrap(), c.contains(&int_vec(&v)));
        let p = c.relint_point();
        prop_assert!(c.contains_relint(&p));
    }

    #[test]
    fn fourier_motzkin_and_simplex_agree(
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), 0u8..3), 1..7),
    ) {
        let cs: Vec<Constraint> = rows
            .iter()
            .map(|(c, r)| Constraint::new(rat_vec(c), [Relation::Eq, Relation::Ge, Relation::Gt][*r as usize]))
            .collect();
        let a = feasible_fm(3, &cs);
        let b = feasible_simplex(3, &cs);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let Some(x) = a { prop_assert!(all_hold(&cs, &x)); }
        if let Some(x) = b { prop_assert!(all_hold(&cs, &x)); }
    }
}

#[test]
fn smith_of_known_matrix() {
    let s = smith(&mat(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3));
    assert_eq!(s.diag, int_vec(&[2, 6, 12]));
}

#[test]
fn cokernel_with_torsion() {
    let c = Cokernel::of(&mat(&[vec![2], vec![0]], 1));
    assert_eq!(c.free_rank, 1);
    assert_eq!(c.torsion, int_vec(&[2]));
    assert!(c.is_zero_class(&int_vec(&[4, 0])));
    assert!(!c.is_zero_class(&int_vec(&[1, 0])));
}

#[test]
fn cone_dual_and_faces() {
    let c = Cone::from_int_rays(&[int_vec(&[1, 0]), int_vec(&[1, 2])], 2).unwrap();
    assert_eq!(c.dim(), 2);
    assert!(!c.contains_line());
    assert!(c.contains(&int_vec(&[1, 1])));
    assert!(!c.contains(&int_vec(&[0, 1])));
    assert!(c.dual().dual().same_as(&c));
    assert_eq!(c.facet_cones().len(), 2);
    let full = Cone::full(2);
    assert!(full.contains_line());
    assert!(full.contains_cone(&c));
    assert!(Cone::zero(2).is_face_of(&c));
}

#[test]
fn zero_vectors_are_dropped_and_ranks_checked() {
    let c = cone_from_rays(&[rat_vec(&[0, 0])], 2).unwrap();
    assert_eq!(c.dim(), 0);
    assert!(matches!(cone_from_rays(&[rat_vec(&[1])], 2), Err(Error::RankMismatch { .. })));
}

#[test]
fn p2_has_three_walls() {
    let doc = fixture("toric_p2");
    let (d, f) = datum_fan(&doc);
    let rep = fan_validate(&f, &d);
    assert!(rep.is_valid() && rep.complete);
    let ws = walls(&f, &d.valuation_cone);
    assert_eq!(ws.len(), 3);
    for w in &ws {
        assert_eq!(w.face.dim(), 1);
        assert_eq!(w.flipped().flipped(), *w);
    }
}

#[test]
fn boundary_of_valuation_cone_is_not_a_wall() {
    let doc = fixture("p1xp1");
    let (d, f) = datum_fan(&doc);
    assert!(f.is_complete(&d.valuation_cone));
    assert!(walls(&f, &d.valuation_cone).is_empty());
}

#[test]
fn incomplete_fan_is_reported_with_its_facet() {
    let doc = fixture("toric_a2");
    let (d, f) = datum_fan(&doc);
    let rep = fan_validate(&f, &d);
    assert!(rep.is_valid());
    assert!(!rep.complete);
    assert!(rep.incomplete.iter().all(|m| m.contains("bounds no other cone")));
}

#[test]
fn overlapping_cones_violate_the_fan_axioms() {
    let rays = [("a", [1, 0]), ("b", [0, 1]), ("c", [1, 1])];
    let d = SphericalDatum::toric(2, rays.iter().map(|(l, r)| (l.to_string(), int_vec(r))).collect()).unwrap();
    let f = ColoredFan::new(&d, &[ConeSpec::new("s", &["a", "b"], &[]), ConeSpec::new("t", &["a", "c"], &[])]).unwrap();
    let rep = fan_validate(&f, &d);
    assert!(!rep.is_valid());
    assert!(rep.violations.iter().any(|v| v.cone_ids.contains(&"s".to_string())));
}
