//! Dense integer and rational matrices: Smith and Hermite normal forms,
//! lattice kernels, integral solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]], cols: usize) -> Self {
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(&rows, cols)
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_iq(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + y * x)
}

pub fn to_q(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMat,
    pub v: IntMat,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

pub fn smith(a: &IntMat) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    let nq = -q;
                    d.add_row(i, t, &nq);
                    u.add_row(i, t, &nq);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    let nq = -q;
                    d.add_col(j, t, &nq);
                    v.add_col(j, t, &nq);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // Bring the smallest remainder into the pivot position.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                } else if best.1 != t {
                    d.swap_cols(t, best.1);
                    v.swap_cols(t, best.1);
                }
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let mut bad_row = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !d[(i, j)].is_multiple_of(&d[(t, t)]) {
                        bad_row = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        diag.push(d[(t, t)].clone());
        t += 1;
    }
    Smith { u, v, diag }
}

/// Row Hermite normal form: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf_rows(a: &IntMat) -> IntMat {
    let mut h = a.clone();
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..h.rows {
                if !h[(i, c)].is_zero()
                    && best.is_none_or(|b| h[(i, c)].abs() < h[(b, c)].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            let mut done = true;
            for i in r + 1..h.rows {
                if !h[(i, c)].is_zero() {
                    let q = -h[(i, c)].div_floor(&h[(r, c)]);
                    h.add_row(i, r, &q);
                    if !h[(i, c)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < h.rows && !h[(r, c)].is_zero() {
            if h[(r, c)].is_negative() {
                h.negate_row(r);
            }
            for i in 0..r {
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row(i, r, &q);
            }
            r += 1;
        }
    }
    let rows: Vec<Vec<BigInt>> = (0..r).map(|i| h.row(i)).collect();
    IntMat::from_rows(&rows, a.cols)
}

/// Basis of the lattice `{x ∈ Z^n : a x = 0}` in Hermite normal form.
pub fn int_kernel(a: &IntMat) -> Vec<Vec<BigInt>> {
    let s = smith(a);
    let basis: Vec<Vec<BigInt>> = (s.rank()..a.cols).map(|j| s.v.col(j)).collect();
    if basis.is_empty() {
        return basis;
    }
    hnf_rows(&IntMat::from_rows(&basis, a.cols)).to_rows()
}

/// Some `x ∈ Z^n` with `a x = b`, if one exists.
pub fn int_solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, val) in ub.iter().enumerate() {
        if i < s.rank() {
            if !val.is_multiple_of(&s.diag[i]) {
                return None;
            }
            y[i] = val / &s.diag[i];
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Rank over the rationals.
pub fn rank(a: &IntMat) -> usize {
    smith(a).rank()
}

pub fn rank_of_rows(rows: &[Vec<BigInt>], cols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&IntMat::from_rows(rows, cols))
}

/// Some rational `x` with `a x = b`, by Gaussian elimination.
pub fn rat_solve(a: &[Vec<BigRational>], b: &[BigRational], ncols: usize) -> Option<Vec<BigRational>> {
    let m = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for x in aug[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=ncols {
                    let v = &aug[r][j] * &f;
                    aug[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Lattice quotient `L1 / L2` where `L2 ⊆ L1 ⊆ Z^n` are given by spanning sets.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    /// Hermite basis of L1 (rows).
    pub basis: Vec<Vec<BigInt>>,
    pub ambient: usize,
    pub coker: Cokernel,
}

impl LatticeQuotient {
    /// `None` when some relation does not lie in `L1`.
    pub fn new(gens: &[Vec<BigInt>], rels: &[Vec<BigInt>], ambient: usize) -> Option<Self> {
        let basis = if gens.is_empty() {
            Vec::new()
        } else {
            hnf_rows(&IntMat::from_rows(gens, ambient)).to_rows()
        };
        let k = basis.len();
        let mut rel_cols = Vec::new();
        let q = LatticeQuotient { basis, ambient, coker: Cokernel::of(&IntMat::zeros(k, 0)) };
        for r in rels {
            rel_cols.push(q.coords(r)?);
        }
        let rel_mat = if rel_cols.is_empty() {
            IntMat::zeros(k, 0)
        } else {
            IntMat::from_rows(&rel_cols, k).transpose()
        };
        Some(LatticeQuotient { coker: Cokernel::of(&rel_mat), ..q })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x ∈ L1` in the basis.
    pub fn coords(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        if self.basis.is_empty() {
            return if x.iter().all(|c| c.is_zero()) { Some(Vec::new()) } else { None };
        }
        let bt = IntMat::from_rows(&self.basis, self.ambient).transpose();
        int_solve(&bt, x)
    }

    /// Class of `x ∈ L1` in the quotient.
    pub fn class_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        Some(self.coker.class_of(&self.coords(x)?))
    }
}

/// Presentation of a finitely generated abelian group `Z^k / R` with a
/// canonical class map. Free coordinates are normalized by a Hermite form so
/// they do not depend on the elimination path; torsion coordinates are
/// reduced modulo the elementary divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    free_map: Vec<Vec<BigInt>>,
    torsion_map: Vec<Vec<BigInt>>,
}

impl Cokernel {
    /// Cokernel of the integer matrix `rel` (k × m) acting on columns: `Z^k / rel Z^m`.
    pub fn of(rel: &IntMat) -> Self {
        let k = rel.rows;
        let s = smith(rel);
        let rk = s.rank();
        let free_rows: Vec<Vec<BigInt>> = (rk..k).map(|i| s.u.row(i)).collect();
        let free_map = if free_rows.is_empty() {
            Vec::new()
        } else {
            hnf_rows(&IntMat::from_rows(&free_rows, k)).to_rows()
        };
        let mut torsion = Vec::new();
        let mut torsion_map = Vec::new();
        for (i, d) in s.diag.iter().enumerate() {
            if !d.is_one() {
                torsion.push(d.clone());
                torsion_map.push(s.u.row(i));
            }
        }
        Cokernel { free_rank: free_map.len(), torsion, free_map, torsion_map }
    }

    /// Class coordinates: free part followed by torsion residues.
    pub fn class_of(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.free_map.iter().map(|r| dot(r, x)).collect();
        for (r, d) in self.torsion_map.iter().zip(&self.torsion) {
            out.push(dot(r, x).mod_floor(d));
        }
        out
    }

    pub fn is_zero_class(&self, x: &[BigInt]) -> bool {
        self.class_of(x).iter().all(|c| c.is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &IntMat) {
        let s = smith(a);
        let d = s.u.mul(a).mul(&s.v);
        for i in 0..d.rows {
            for j in 0..d.cols {
                if i == j && i < s.rank() {
                    assert_eq!(d[(i, j)], s.diag[i]);
                } else {
                    assert!(d[(i, j)].is_zero());
                }
            }
        }
        for w in s.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn smith_small() {
        check_smith(&IntMat::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], 3));
        let s = smith(&IntMat::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], 3));
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        check_smith(&IntMat::from_i64(&[&[1, 0], &[1, 2]], 2));
        check_smith(&IntMat::zeros(2, 3));
        check_smith(&IntMat::zeros(0, 3));
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMat::from_i64(&[&[1, 1, -1]], 3);
        let k = int_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let q = IntMat::from_i64(&[&[1, 0], &[1, 2]], 2);
        assert!(int_solve(&q, &[BigInt::from(1), BigInt::from(0)]).is_none());
        assert!(int_solve(&q, &[BigInt::from(1), BigInt::from(1)]).is_some());
    }
}
