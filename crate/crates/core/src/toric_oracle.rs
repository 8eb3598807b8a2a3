//! Classical toric divisor theory on simplicial-or-not fans given by rays and
//! maximal cones, plus a seeded generator of complete fans in rank ≤ 3.
//!
//! Shares only lattice primitives with the spherical code paths so the two can
//! be compared.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divisor_theory::SphericalDatum;
use crate::error::{Error, Result};
use crate::lattice_geom::feasibility::{feasible_simplex, Constraint, Relation};
use crate::lattice_geom::matrix::{dot, int_kernel, int_solve, rank_of_rows, rat_solve, to_q, IntMat};
use crate::lattice_geom::{primitive, Cone, ColoredFan, ConeSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricFan {
    pub rank: usize,
    pub rays: Vec<Vec<BigInt>>,
    /// Maximal cones as sorted ray indices.
    pub cones: Vec<Vec<usize>>,
    pub complete: bool,
}

/// Free rank and torsion of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupShape {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl ToricFan {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>, complete: bool) -> ToricFan {
        let rays = rays.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        let cones = cones.into_iter().map(|c| c.into_iter().sorted().collect()).collect();
        ToricFan { rank, rays, cones, complete }
    }

    pub fn ray_label(i: usize) -> String {
        format!("r{i}")
    }

    pub fn cone(&self, j: usize) -> Cone {
        let rays: Vec<Vec<BigInt>> = self.cones[j].iter().map(|&i| self.rays[i].clone()).collect();
        Cone::from_int_rays(&rays, self.rank).expect("rays have the fan rank")
    }

    /// The same fan as a colorless spherical embedding.
    pub fn to_spherical(&self) -> Result<(SphericalDatum, ColoredFan)> {
        let rays = self.rays.iter().enumerate().map(|(i, r)| (ToricFan::ray_label(i), r.clone())).collect();
        let datum = SphericalDatum::toric(self.rank, rays)?;
        let specs: Vec<ConeSpec> = self
            .cones
            .iter()
            .enumerate()
            .map(|(j, c)| ConeSpec {
                id: format!("s{j}"),
                rays: c.iter().map(|&i| ToricFan::ray_label(i)).collect(),
                colors: Vec::new(),
            })
            .collect();
        let fan = ColoredFan::new(&datum, &specs)?;
        Ok((datum, fan))
    }

    /// Pairs of maximal cones sharing a codimension-one face.
    pub fn walls(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for a in 0..self.cones.len() {
            for b in a + 1..self.cones.len() {
                let common: Vec<usize> = self.cones[a].iter().filter(|i| self.cones[b].contains(i)).cloned().collect();
                let rows: Vec<Vec<BigInt>> = common.iter().map(|&i| self.rays[i].clone()).collect();
                if rank_of_rows(&rows, self.rank) + 1 == self.rank {
                    out.push((a, b, common));
                }
            }
        }
        out
    }
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    // Bareiss elimination.
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Cokernel of `M → Z^{rays}` from the determinantal divisors of the ray matrix.
pub fn toric_class_group(fan: &ToricFan) -> GroupShape {
    let n = fan.rays.len();
    let r = fan.rank;
    let mut prev = BigInt::one();
    let mut torsion = Vec::new();
    let mut rank = 0;
    for k in 1..=n.min(r) {
        let mut g = BigInt::zero();
        for rows in (0..n).combinations(k) {
            for cols in (0..r).combinations(k) {
                let sub: Vec<Vec<BigInt>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| fan.rays[i][j].clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        rank = k;
        let s = &g / &prev;
        if !s.is_one() {
            torsion.push(s);
        }
        prev = g;
    }
    GroupShape { free_rank: n - rank, torsion }
}

/// Characters `m_σ` with `⟨u, m_σ⟩ = a_u` on the rays of each maximal cone.
pub fn toric_cartier(fan: &ToricFan, a: &[BigInt]) -> Option<Vec<Vec<BigInt>>> {
    let mut out = Vec::new();
    for c in &fan.cones {
        let rows: Vec<Vec<BigRational>> = c.iter().map(|&i| to_q(&fan.rays[i])).collect();
        let rhs: Vec<BigRational> = c.iter().map(|&i| BigRational::from_integer(a[i].clone())).collect();
        let m = rat_solve(&rows, &rhs, fan.rank)?;
        if m.iter().any(|x| !x.is_integer()) {
            // A rational solution may still differ from an integral one by the kernel.
            let mat = IntMat::from_rows(&c.iter().map(|&i| fan.rays[i].clone()).collect::<Vec<_>>(), fan.rank);
            out.push(int_solve(&mat, &c.iter().map(|&i| a[i].clone()).collect::<Vec<_>>())?);
        } else {
            out.push(m.iter().map(|x| x.to_integer()).collect());
        }
    }
    Some(out)
}

fn support_test(fan: &ToricFan, a: &[BigInt], strict: bool) -> Result<bool> {
    if !fan.complete {
        return Err(Error::NotComplete);
    }
    let ms = toric_cartier(fan, a).ok_or_else(|| Error::NotCartier("toric".to_string()))?;
    for (c, m) in fan.cones.iter().zip(&ms) {
        for (i, u) in fan.rays.iter().enumerate() {
            if c.contains(&i) {
                continue;
            }
            let v = dot(u, m);
            if v > a[i] || (strict && v == a[i]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Ampleness: every `m_σ` lies strictly below the divisor on rays outside `σ`.
pub fn toric_ample(fan: &ToricFan, a: &[BigInt]) -> Result<bool> {
    support_test(fan, a, true)
}

pub fn toric_nef(fan: &ToricFan, a: &[BigInt]) -> Result<bool> {
    support_test(fan, a, false)
}

/// Existence of an ample Q-divisor.
pub fn toric_projective(fan: &ToricFan) -> bool {
    let n = fan.rays.len();
    let r = fan.rank;
    let k = fan.cones.len();
    let nv = n + k * r;
    let mut cs = Vec::new();
    for (j, c) in fan.cones.iter().enumerate() {
        for (i, u) in fan.rays.iter().enumerate() {
            let mut row = vec![BigRational::zero(); nv];
            row[i] = BigRational::one();
            for t in 0..r {
                row[n + j * r + t] = -BigRational::from_integer(u[t].clone());
            }
            let rel = if c.contains(&i) { Relation::Eq } else { Relation::Gt };
            cs.push(Constraint::new(row, rel));
        }
    }
    feasible_simplex(nv, &cs).is_some()
}

/// `−K = Σ D_ρ`.
pub fn toric_anticanonical(fan: &ToricFan) -> Vec<BigInt> {
    vec![BigInt::one(); fan.rays.len()]
}

/// `a − b = (⟨u_ρ, m⟩)_ρ` for some integral `m`.
pub fn toric_linearly_equivalent(fan: &ToricFan, a: &[BigInt], b: &[BigInt]) -> bool {
    let rows: Vec<Vec<BigRational>> = fan.rays.iter().map(|u| to_q(u)).collect();
    let rhs: Vec<BigRational> = a.iter().zip(b).map(|(x, y)| BigRational::from_integer(x - y)).collect();
    match rat_solve(&rows, &rhs, fan.rank) {
        None => false,
        Some(m) if m.iter().all(|x| x.is_integer()) => true,
        Some(_) => {
            let mat = IntMat::from_rows(&fan.rays, fan.rank);
            let d: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            int_solve(&mat, &d).is_some()
        }
    }
}

/// `D · V(τ)` for every wall `τ = σ_a ∩ σ_b`.
pub fn toric_wall_intersections(fan: &ToricFan, a: &[BigInt]) -> Option<Vec<(usize, usize, BigInt)>> {
    let ms = toric_cartier(fan, a)?;
    let mut out = Vec::new();
    for (sa, sb, common) in fan.walls() {
        let normal = if common.is_empty() {
            vec![BigInt::one()]
        } else {
            let rows: Vec<Vec<BigInt>> = common.iter().map(|&i| fan.rays[i].clone()).collect();
            let ker = int_kernel(&IntMat::from_rows(&rows, fan.rank));
            primitive(&ker[0]).ok()?
        };
        let outside = fan.cones[sb].iter().find(|i| !common.contains(i)).expect("wall has a far ray");
        let normal: Vec<BigInt> =
            if dot(&normal, &fan.rays[*outside]).is_negative() { normal.iter().map(|x| -x).collect() } else { normal };
        // A lattice vector generating N / N_τ on the side of σ_b.
        let u = int_solve(&IntMat::from_rows(&[normal], fan.rank), &[BigInt::one()])?;
        let diff: Vec<BigInt> = ms[sb].iter().zip(&ms[sa]).map(|(x, y)| x - y).collect();
        out.push((sa, sb, dot(&u, &diff)));
    }
    Some(out)
}

/// Complete fans: `P¹` in rank 1, random polygons in rank 2, stellar
/// subdivisions of the octahedral fan (or a twisted prism) in rank 3.
pub fn random_complete_fan(rank: usize, seed: u64) -> Result<ToricFan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rank {
        1 => Ok(ToricFan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]], true)),
        2 => Ok(random_polygon_fan(&mut rng)),
        3 => Ok(random_rank3_fan(&mut rng)),
        _ => Err(Error::invalid(format!("random fans only for rank 1..3, got {rank}"))),
    }
}

fn half(v: &[i64]) -> u8 {
    if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
        0
    } else {
        1
    }
}

fn cross(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn random_polygon_fan(rng: &mut ChaCha8Rng) -> ToricFan {
    loop {
        let k = rng.gen_range(3..=7);
        let mut rays: Vec<Vec<i64>> = Vec::new();
        while rays.len() < k {
            let v = [rng.gen_range(-4..=4i64), rng.gen_range(-4..=4i64)];
            let g = v[0].gcd(&v[1]);
            if g == 0 {
                continue;
            }
            let v = vec![v[0] / g, v[1] / g];
            if !rays.contains(&v) {
                rays.push(v);
            }
        }
        rays.sort_by(|a, b| half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b))));
        let ok = (0..k).all(|i| cross(&rays[i], &rays[(i + 1) % k]) > 0);
        if ok {
            let cones = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
            return ToricFan::new(2, rays, cones, true);
        }
    }
}

fn random_rank3_fan(rng: &mut ChaCha8Rng) -> ToricFan {
    let mut fan = if rng.gen_range(0..4) == 0 {
        twisted_prism()
    } else {
        let rays = vec![vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, -1, 0], vec![0, 0, 1], vec![0, 0, -1]];
        let mut cones = Vec::new();
        for x in [0, 1] {
            for y in [2, 3] {
                for z in [4, 5] {
                    cones.push(vec![x, y, z]);
                }
            }
        }
        ToricFan::new(3, rays, cones, true)
    };
    let steps = rng.gen_range(0..=4);
    for _ in 0..steps {
        let j = rng.gen_range(0..fan.cones.len());
        let size = rng.gen_range(2..=3);
        let mut face = fan.cones[j].clone();
        face.shuffle(rng);
        face.truncate(size);
        face.sort();
        let mut p = vec![BigInt::zero(); 3];
        for &i in &face {
            let c = BigInt::from(rng.gen_range(1..=2));
            for t in 0..3 {
                p[t] += &c * &fan.rays[i][t];
            }
        }
        let p = primitive(&p).expect("nonzero sum in a pointed cone");
        if fan.rays.contains(&p) {
            continue;
        }
        stellar_subdivide(&mut fan, &face, p);
    }
    fan
}

/// Star subdivision at `p` in the relative interior of `face`; all cones are simplicial.
pub fn stellar_subdivide(fan: &mut ToricFan, face: &[usize], p: Vec<BigInt>) {
    let new = fan.rays.len();
    fan.rays.push(p);
    let mut cones = Vec::new();
    for c in &fan.cones {
        if face.iter().all(|i| c.contains(i)) {
            for v in face {
                let mut d: Vec<usize> = c.iter().filter(|&i| i != v).cloned().collect();
                d.push(new);
                d.sort();
                cones.push(d);
            }
        } else {
            cones.push(c.clone());
        }
    }
    fan.cones = cones;
}

/// Complete simplicial fan that is not projective: a triangular prism whose
/// side quadrilaterals are all split along `a_i b_{i+1}`.
pub fn twisted_prism() -> ToricFan {
    let rays = vec![vec![1, 0, -1], vec![0, 1, -1], vec![-1, -1, -1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]];
    let mut cones = vec![vec![0, 1, 2], vec![3, 4, 5]];
    for i in 0..3 {
        let j = (i + 1) % 3;
        cones.push(vec![i, j, 3 + j]);
        cones.push(vec![i, 3 + i, 3 + j]);
    }
    ToricFan::new(3, rays, cones, true)
}

#[derive(Clone, Debug)]
pub struct DifferentialConfig {
    pub rank: usize,
    pub seed: u64,
    /// Random divisors tested per fan.
    pub divisors: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DifferentialReport {
    pub checks: usize,
    pub mismatches: Vec<String>,
}

impl DifferentialReport {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches.push(what());
        }
    }
}

/// Compares the spherical code paths with this oracle on one seeded fan.
pub fn differential_check(cfg: &DifferentialConfig) -> Result<DifferentialReport> {
    use crate::canonical_divisor::anticanonical_toroidal;
    use crate::curve_classes::{nef_via_curves, wall_class_eval};
    use crate::divisor_theory::{
        cartier_data, class_group, is_ample, is_globally_generated, is_quasi_projective, DivisorZ,
    };

    let fan = random_complete_fan(cfg.rank, cfg.seed)?;
    let (datum, cfan) = fan.to_spherical()?;
    let tag = format!("rank {} seed {}", cfg.rank, cfg.seed);
    let mut rep = DifferentialReport::default();
    let labels: Vec<String> = (0..fan.rays.len()).map(ToricFan::ray_label).collect();
    let to_div = |a: &[BigInt]| {
        let mut d = DivisorZ::zero();
        for (l, c) in labels.iter().zip(a) {
            d.set(l, c.clone());
        }
        d
    };

    let (cl, cmap) = class_group(&datum);
    let shape = toric_class_group(&fan);
    rep.check(cl.free_rank == shape.free_rank && cl.torsion == shape.torsion, || {
        format!("{tag}: class group {cl} vs oracle rank {} torsion {:?}", shape.free_rank, shape.torsion)
    });

    let qp = is_quasi_projective(&datum, &cfan);
    let tp = toric_projective(&fan);
    rep.check(qp == tp, || format!("{tag}: quasi-projective {qp} vs oracle {tp}"));

    let k = anticanonical_toroidal(&datum, &cfan)?;
    let tk = to_div(&toric_anticanonical(&fan));
    rep.check(k == tk, || format!("{tag}: anticanonical {k} vs oracle {tk}"));
    rep.check(cmap.linearly_equivalent(&k, &tk), || format!("{tag}: anticanonical class differs"));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut prev: Option<Vec<BigInt>> = None;
    for t in 0..cfg.divisors {
        let a: Vec<BigInt> = (0..fan.rays.len()).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
        let d = to_div(&a);
        let main = cartier_data(&datum, &cfan, &d);
        let oracle = toric_cartier(&fan, &a);
        rep.check(main.is_ok() == oracle.is_some(), || {
            format!("{tag} divisor {t}: cartier {} vs oracle {}", main.is_ok(), oracle.is_some())
        });
        if let Some(b) = &prev {
            let m = cmap.linearly_equivalent(&d, &to_div(b));
            let o = toric_linearly_equivalent(&fan, &a, b);
            rep.check(m == o, || format!("{tag} divisor {t}: linear equivalence {m} vs oracle {o}"));
        }
        prev = Some(a.clone());
        if main.is_err() || oracle.is_none() {
            continue;
        }
        let amp = is_ample(&datum, &cfan, &d)?;
        let tamp = toric_ample(&fan, &a)?;
        rep.check(amp == tamp, || format!("{tag} divisor {t}: ample {amp} vs oracle {tamp}"));
        let gg = is_globally_generated(&datum, &cfan, &d)?;
        let nef = nef_via_curves(&datum, &cfan, &d)?;
        let tnef = toric_nef(&fan, &a)?;
        rep.check(gg == tnef && nef == tnef, || format!("{tag} divisor {t}: gg {gg} nef {nef} vs oracle {tnef}"));
        let ws = crate::lattice_geom::walls(&cfan, &datum.valuation_cone);
        for (sa, sb, value) in toric_wall_intersections(&fan, &a).unwrap_or_default() {
            let (ia, ib) = (format!("s{sa}"), format!("s{sb}"));
            let w = ws.iter().find(|w| {
                (w.plus_cone == ia && w.minus_cone == ib) || (w.plus_cone == ib && w.minus_cone == ia)
            });
            let Some(w) = w else {
                rep.check(false, || format!("{tag}: wall {ia}|{ib} missing on the main path"));
                continue;
            };
            let v = wall_class_eval(&datum, &cfan, w, &d)?;
            let expect = BigRational::from_integer(value.clone());
            rep.check(v == expect, || format!("{tag} divisor {t}: wall {ia}|{ib} value {v} vs oracle {value}"));
        }
    }
    Ok(rep)
}
