//! Root systems in ε-coordinates, Weyl group elements with canonical words,
//! minimal coset representatives and the ρ-weight pairings.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        Some(match s.trim() {
            "A" | "a" => Family::A,
            "B" | "b" => Family::B,
            "C" | "c" => Family::C,
            "D" | "d" => Family::D,
            "E" | "e" => Family::E,
            "F" | "f" => Family::F,
            "G" | "g" => Family::G,
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn half(n: i64) -> Q {
    Q::new(n.into(), 2.into())
}

fn inner(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y)
}

/// A simple root system realized in standard ε-coordinates.
#[derive(Clone, Debug)]
pub struct RootSystemDatum {
    pub family: Family,
    pub rank: usize,
    pub simple_roots: Vec<Vec<Q>>,
    pub simple_coroots: Vec<Vec<Q>>,
    /// `cartan[i][j] = ⟨α_i^∨, α_j⟩`
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, sorted by height.
    positive: Vec<Vec<i64>>,
}

impl PartialEq for RootSystemDatum {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.rank == other.rank
    }
}

impl Eq for RootSystemDatum {}

impl fmt::Display for RootSystemDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

fn eps(dim: usize, entries: &[(usize, Q)]) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    for (i, x) in entries {
        v[*i] += x;
    }
    v
}

fn simple_roots(family: Family, n: usize) -> Option<Vec<Vec<Q>>> {
    let chain = |dim: usize, count: usize| -> Vec<Vec<Q>> {
        (0..count).map(|i| eps(dim, &[(i, q(1)), (i + 1, q(-1))])).collect()
    };
    Some(match family {
        Family::A if n >= 1 => chain(n + 1, n),
        Family::B if n >= 2 => {
            let mut r = chain(n, n - 1);
            r.push(eps(n, &[(n - 1, q(1))]));
            r
        }
        Family::C if n >= 2 => {
            let mut r = chain(n, n - 1);
            r.push(eps(n, &[(n - 1, q(2))]));
            r
        }
        Family::D if n >= 4 => {
            let mut r = chain(n, n - 1);
            r.push(eps(n, &[(n - 2, q(1)), (n - 1, q(1))]));
            r
        }
        Family::E if (6..=8).contains(&n) => {
            let mut r = vec![
                vec![half(1), half(-1), half(-1), half(-1), half(-1), half(-1), half(-1), half(1)],
                eps(8, &[(0, q(1)), (1, q(1))]),
            ];
            for i in 0..6 {
                r.push(eps(8, &[(i + 1, q(1)), (i, q(-1))]));
            }
            r.truncate(n);
            r
        }
        Family::F if n == 4 => vec![
            eps(4, &[(1, q(1)), (2, q(-1))]),
            eps(4, &[(2, q(1)), (3, q(-1))]),
            eps(4, &[(3, q(1))]),
            vec![half(1), half(-1), half(-1), half(-1)],
        ],
        Family::G if n == 2 => vec![eps(3, &[(0, q(1)), (1, q(-1))]), eps(3, &[(0, q(-2)), (1, q(1)), (2, q(1))])],
        _ => return None,
    })
}

/// Standard ε-coordinate realization of the simple root system `family_rank`.
pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystemDatum> {
    let simple = simple_roots(family, rank)
        .ok_or_else(|| Error::InvalidRootSystem { family: family.letter().to_string(), rank })?;
    let coroots: Vec<Vec<Q>> = simple
        .iter()
        .map(|a| {
            let s = q(2) / inner(a, a);
            a.iter().map(|x| x * &s).collect()
        })
        .collect();
    let cartan: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let v = inner(&coroots[i], &simple[j]);
                    assert!(v.is_integer());
                    i64::try_from(v.to_integer()).expect("small Cartan entry")
                })
                .collect()
        })
        .collect();
    let mut rs = RootSystemDatum { family, rank, simple_roots: simple, simple_coroots: coroots, cartan, positive: Vec::new() };
    rs.positive = rs.enumerate_positive_roots();
    Ok(rs)
}

/// Weyl group element with its canonical (lexicographically minimal reduced) word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    /// `word = [a1, …, ak]` denotes `s_{a1} ⋯ s_{ak}` (0-based indices).
    pub word: Vec<usize>,
    /// `w(ρ)` in fundamental-weight coordinates.
    image: Vec<i64>,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// `e` or `s1s2…` with 1-based indices.
    pub fn label(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect()
        }
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl RootSystemDatum {
    pub fn ambient_dim(&self) -> usize {
        self.simple_roots[0].len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.rank {
            Ok(())
        } else {
            Err(Error::invalid(format!("simple root index {} out of range for {}", i + 1, self)))
        }
    }

    /// `⟨α_k^∨, β⟩` for `β` in simple-root coordinates.
    fn coroot_pairing_root(&self, k: usize, beta: &[i64]) -> i64 {
        beta.iter().zip(&self.cartan[k]).map(|(b, a)| b * a).sum()
    }

    pub fn reflect_root(&self, k: usize, beta: &[i64]) -> Vec<i64> {
        let p = self.coroot_pairing_root(k, beta);
        let mut out = beta.to_vec();
        out[k] -= p;
        out
    }

    fn enumerate_positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(b) = queue.pop_front() {
            for k in 0..n {
                let r = self.reflect_root(k, &b);
                if r.iter().all(|&c| c >= 0) && seen.insert(r.clone()) {
                    queue.push_back(r);
                }
            }
        }
        let mut pos: Vec<Vec<i64>> = seen.into_iter().collect();
        pos.sort_by_key(|r| (r.iter().sum::<i64>(), std::cmp::Reverse(r.clone())));
        pos
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive
    }

    pub fn root_count(&self) -> usize {
        2 * self.positive.len()
    }

    pub fn is_positive_root(beta: &[i64]) -> bool {
        beta.iter().all(|&c| c >= 0) && beta.iter().any(|&c| c > 0)
    }

    /// The ambient vector `Σ c_j α_j`.
    pub fn ambient(&self, beta: &[i64]) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.ambient_dim()];
        for (c, a) in beta.iter().zip(&self.simple_roots) {
            if *c != 0 {
                for (x, y) in v.iter_mut().zip(a) {
                    *x += y * q(*c);
                }
            }
        }
        v
    }

    /// Half-sum of the positive roots supported on `subset` (all roots when `None`).
    fn half_sum(&self, subset: Option<&[usize]>) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.ambient_dim()];
        for r in &self.positive {
            let inside = match subset {
                None => true,
                Some(s) => r.iter().enumerate().all(|(j, &c)| c == 0 || s.contains(&j)),
            };
            if inside {
                for (x, y) in v.iter_mut().zip(self.ambient(r)) {
                    *x += y;
                }
            }
        }
        v.into_iter().map(|x| x / q(2)).collect()
    }

    pub fn rho(&self) -> Vec<Q> {
        self.half_sum(None)
    }

    pub fn rho_levi(&self, levi: &[usize]) -> Vec<Q> {
        self.half_sum(Some(levi))
    }

    /// `⟨α_k^∨, v⟩` for an ambient vector `v`.
    pub fn coroot_pairing(&self, k: usize, v: &[Q]) -> Q {
        inner(&self.simple_coroots[k], v)
    }

    /// Fundamental weights in ambient coordinates, inside the span of the roots.
    pub fn fundamental_weights(&self) -> Vec<Vec<Q>> {
        let n = self.rank;
        let a: Vec<Vec<Q>> = self.cartan.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect();
        (0..n)
            .map(|i| {
                let mut e = vec![Q::zero(); n];
                e[i] = Q::one();
                let c = crate::lattice_geom::matrix::rat_solve(&a, &e, n).expect("Cartan matrix is invertible");
                let mut w = vec![Q::zero(); self.ambient_dim()];
                for (ck, ak) in c.iter().zip(&self.simple_roots) {
                    for (x, y) in w.iter_mut().zip(ak) {
                        *x += ck * y;
                    }
                }
                w
            })
            .collect()
    }

    /// Order of the Weyl group, as the product of the degrees.
    pub fn weyl_order(&self) -> BigInt {
        let mut heights: Vec<usize> = Vec::new();
        for r in &self.positive {
            let h = r.iter().sum::<i64>() as usize;
            if heights.len() < h {
                heights.resize(h, 0);
            }
            heights[h - 1] += 1;
        }
        (1..=self.rank)
            .map(|i| heights.iter().filter(|&&c| c >= i).count() + 1)
            .fold(BigInt::one(), |acc, d| acc * BigInt::from(d))
    }

    fn reflect_weight(&self, k: usize, lambda: &mut [i64]) {
        let lk = lambda[k];
        for (i, x) in lambda.iter_mut().enumerate() {
            *x -= lk * self.cartan[i][k];
        }
    }

    fn element_of_image(&self, image: Vec<i64>) -> WeylElement {
        let mut v = image.clone();
        let mut word = Vec::new();
        while let Some(i) = v.iter().position(|&x| x < 0) {
            word.push(i);
            self.reflect_weight(i, &mut v);
        }
        WeylElement { word, image }
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement { word: Vec::new(), image: vec![1; self.rank] }
    }

    /// Element represented by an arbitrary word (not necessarily reduced).
    pub fn element(&self, word: &[usize]) -> Result<WeylElement> {
        for &i in word {
            self.check_index(i)?;
        }
        let mut v = vec![1; self.rank];
        for &i in word.iter().rev() {
            self.reflect_weight(i, &mut v);
        }
        Ok(self.element_of_image(v))
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElement {
        self.element(&[i]).expect("valid index")
    }

    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut w = a.word.clone();
        w.extend(&b.word);
        self.element(&w).expect("valid word")
    }

    pub fn inverse(&self, a: &WeylElement) -> WeylElement {
        let w: Vec<usize> = a.word.iter().rev().cloned().collect();
        self.element(&w).expect("valid word")
    }

    /// `w(β)` for a root in simple-root coordinates.
    pub fn act_on_root(&self, w: &WeylElement, beta: &[i64]) -> Vec<i64> {
        let mut b = beta.to_vec();
        for &i in w.word.iter().rev() {
            b = self.reflect_root(i, &b);
        }
        b
    }

    /// `w^{-1}(β)`.
    pub fn act_inverse_on_root(&self, w: &WeylElement, beta: &[i64]) -> Vec<i64> {
        let mut b = beta.to_vec();
        for &i in &w.word {
            b = self.reflect_root(i, &b);
        }
        b
    }

    fn simple(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        e
    }

    /// `w ∈ W^P` iff `w(β) > 0` for every simple root `β` of `P`.
    pub fn in_min_coset(&self, w: &WeylElement, p: &[usize]) -> bool {
        p.iter().all(|&b| Self::is_positive_root(&self.act_on_root(w, &self.simple(b))))
    }

    /// Reducedness of a word and the length of its product.
    pub fn is_reduced(&self, word: &[usize]) -> Result<(bool, usize)> {
        let w = self.element(word)?;
        Ok((w.length() == word.len(), w.length()))
    }

    /// All elements, sorted by length then canonical word.
    pub fn all_elements(&self) -> Vec<WeylElement> {
        self.minimal_coset_reps(&[]).expect("empty parabolic")
    }

    /// Minimal length representatives of `W / W_P`, sorted by length then word.
    pub fn minimal_coset_reps(&self, p: &[usize]) -> Result<Vec<WeylElement>> {
        for &i in p {
            self.check_index(i)?;
        }
        let e = self.identity();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(e.word.clone());
        let mut out = vec![e.clone()];
        let mut queue = VecDeque::from([e]);
        while let Some(w) = queue.pop_front() {
            for i in 0..self.rank {
                let mut word = vec![i];
                word.extend(&w.word);
                let nw = self.element(&word)?;
                if nw.length() == w.length() + 1 && self.in_min_coset(&nw, p) && seen.insert(nw.word.clone()) {
                    out.push(nw.clone());
                    queue.push_back(nw);
                }
            }
        }
        out.sort_by(|a, b| (a.length(), &a.word).cmp(&(b.length(), &b.word)));
        Ok(out)
    }

    /// Raising behavior of `P_α` on the Schubert cell of `w ∈ W^P`.
    pub fn classify_beta(&self, w: &WeylElement, alpha: usize, p: &[usize]) -> Result<BetaCase> {
        self.check_index(alpha)?;
        if !self.in_min_coset(w, p) {
            return Err(Error::NotMinimalCosetRep(w.label()));
        }
        let beta = self.act_inverse_on_root(w, &self.simple(alpha));
        for &g in p {
            let s = self.simple(g);
            if beta == s {
                return Ok(BetaCase::CaseB { gamma: g, positive: true });
            }
            if beta.iter().zip(&s).all(|(b, x)| *b == -x) {
                return Ok(BetaCase::CaseB { gamma: g, positive: false });
            }
        }
        if Self::is_positive_root(&beta) {
            let sw = self.mul(&self.simple_reflection(alpha), w);
            if self.in_min_coset(&sw, p) {
                return Ok(BetaCase::CaseA);
            }
        }
        Ok(BetaCase::NoRaise)
    }

    /// `⟨α^∨, ρ − ρ_I⟩`.
    pub fn rho_pairing(&self, alpha: usize, levi: &[usize]) -> Result<BigInt> {
        self.check_index(alpha)?;
        for &i in levi {
            self.check_index(i)?;
        }
        let diff: Vec<Q> = self.rho().iter().zip(self.rho_levi(levi)).map(|(a, b)| a - b).collect();
        let v = self.coroot_pairing(alpha, &diff);
        if !v.is_integer() {
            return Err(Error::Precondition(format!("pairing {v} is not integral")));
        }
        Ok(v.to_integer())
    }

    /// Order `m_ij` of `s_i s_j`.
    pub fn braid_order(&self, i: usize, j: usize) -> usize {
        if i == j {
            return 1;
        }
        match self.cartan[i][j] * self.cartan[j][i] {
            0 => 2,
            1 => 3,
            2 => 4,
            3 => 6,
            _ => unreachable!("finite type"),
        }
    }

    /// Cartan submatrix on the given ordered indices.
    pub fn cartan_submatrix(&self, idx: &[usize]) -> Vec<Vec<i64>> {
        idx.iter().map(|&i| idx.iter().map(|&j| self.cartan[i][j]).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaCase {
    /// `β > 0` and not simple in `P`: a type U raise to `s_α w`.
    CaseA,
    /// `±β = γ` is a simple root of `P`: the raise is read off the Levi graph.
    CaseB { gamma: usize, positive: bool },
    NoRaise,
}
