//! Exact feasibility of homogeneous linear systems with equalities, weak and
//! strict inequalities. Two independent routes: Fourier–Motzkin elimination
//! with strictness flags, and a phase-one simplex with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Ge,
    Gt,
}

/// `coeffs · x  rel  0`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rel: Relation,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, rel: Relation) -> Self {
        Constraint { coeffs, rel }
    }

    pub fn holds(&self, x: &[BigRational]) -> bool {
        let v = self.coeffs.iter().zip(x).fold(BigRational::zero(), |a, (c, y)| a + c * y);
        match self.rel {
            Relation::Eq => v.is_zero(),
            Relation::Ge => !v.is_negative(),
            Relation::Gt => v.is_positive(),
        }
    }

    fn normalized(mut self) -> Self {
        if let Some(p) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let s = p.abs().recip();
            let flip = self.rel == Relation::Eq && p.is_negative();
            for c in self.coeffs.iter_mut() {
                *c = &*c * &s;
                if flip {
                    *c = -&*c;
                }
            }
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

pub fn all_hold(cs: &[Constraint], x: &[BigRational]) -> bool {
    cs.iter().all(|c| c.holds(x))
}

enum Level {
    Subst(usize, Vec<BigRational>),
    Bound(usize, Vec<Constraint>),
}

/// Fourier–Motzkin elimination; returns a witness when feasible.
pub fn feasible_fm(n: usize, constraints: &[Constraint]) -> Option<Vec<BigRational>> {
    let mut cs: Vec<Constraint> = constraints.iter().cloned().map(Constraint::normalized).collect();
    dedup(&mut cs);
    let mut levels = Vec::new();
    for k in (0..n).rev() {
        if let Some(pos) = cs.iter().position(|c| c.rel == Relation::Eq && !c.coeffs[k].is_zero()) {
            let eq = cs.swap_remove(pos);
            let ak = eq.coeffs[k].clone();
            let expr: Vec<BigRational> =
                eq.coeffs.iter().enumerate().map(|(j, a)| if j == k { BigRational::zero() } else { -a / &ak }).collect();
            for c in cs.iter_mut() {
                if !c.coeffs[k].is_zero() {
                    let f = &c.coeffs[k] / &ak;
                    for (cj, ej) in c.coeffs.iter_mut().zip(&eq.coeffs) {
                        *cj -= &f * ej;
                    }
                }
            }
            levels.push(Level::Subst(k, expr));
        } else {
            let (involved, rest): (Vec<Constraint>, Vec<Constraint>) =
                cs.into_iter().partition(|c| !c.coeffs[k].is_zero());
            let mut next = rest;
            let pos: Vec<&Constraint> = involved.iter().filter(|c| c.coeffs[k].is_positive()).collect();
            let neg: Vec<&Constraint> = involved.iter().filter(|c| c.coeffs[k].is_negative()).collect();
            for p in &pos {
                for q in &neg {
                    let a = p.coeffs[k].clone();
                    let b = -q.coeffs[k].clone();
                    let coeffs: Vec<BigRational> =
                        p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x / &a + y / &b).collect();
                    let rel = if p.rel == Relation::Gt || q.rel == Relation::Gt { Relation::Gt } else { Relation::Ge };
                    next.push(Constraint::new(coeffs, rel).normalized());
                }
            }
            dedup(&mut next);
            cs = next;
            levels.push(Level::Bound(k, involved));
        }
        cs.retain(|c| !(c.is_trivial() && c.rel != Relation::Gt));
        if cs.iter().any(|c| c.is_trivial() && c.rel == Relation::Gt) {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for level in levels.iter().rev() {
        match level {
            Level::Subst(k, expr) => {
                x[*k] = expr.iter().zip(&x).fold(BigRational::zero(), |a, (c, y)| a + c * y);
            }
            Level::Bound(k, list) => {
                let mut lo: Option<BigRational> = None;
                let mut hi: Option<BigRational> = None;
                for c in list {
                    let rest = c
                        .coeffs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| j != k)
                        .fold(BigRational::zero(), |a, (j, cj)| a + cj * &x[j]);
                    let bound = -rest / &c.coeffs[*k];
                    if c.coeffs[*k].is_positive() {
                        if lo.as_ref().is_none_or(|l| bound > *l) {
                            lo = Some(bound);
                        }
                    } else if hi.as_ref().is_none_or(|h| bound < *h) {
                        hi = Some(bound);
                    }
                }
                x[*k] = match (lo, hi) {
                    (None, None) => BigRational::zero(),
                    (Some(l), None) => l + BigRational::one(),
                    (None, Some(h)) => h - BigRational::one(),
                    (Some(l), Some(h)) => {
                        if l == h {
                            l
                        } else {
                            (l + h) / BigRational::from_integer(2.into())
                        }
                    }
                };
            }
        }
    }
    debug_assert!(all_hold(constraints, &x));
    Some(x)
}

fn dedup(cs: &mut Vec<Constraint>) {
    let mut seen: Vec<Constraint> = Vec::with_capacity(cs.len());
    for c in cs.drain(..) {
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    *cs = seen;
}

/// Basis of `{x : Ax = 0}` over Q, from the reduced row echelon form.
fn rational_nullspace(rows: &[Vec<BigRational>], n: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

/// Phase-one simplex on the homogeneous system, strict rows scaled to `≥ 1`.
///
/// Equalities are eliminated first by passing to a basis of their solution space.
pub fn feasible_simplex(n: usize, constraints: &[Constraint]) -> Option<Vec<BigRational>> {
    if constraints.iter().all(|c| c.rel != Relation::Gt) {
        return Some(vec![BigRational::zero(); n]);
    }
    let eqs: Vec<Vec<BigRational>> =
        constraints.iter().filter(|c| c.rel == Relation::Eq).map(|c| c.coeffs.clone()).collect();
    let basis = if eqs.is_empty() {
        None
    } else {
        Some(rational_nullspace(&eqs, n))
    };
    let Some(k) = basis else {
        let mut cs: Vec<Constraint> = constraints.iter().cloned().map(Constraint::normalized).collect();
        dedup(&mut cs);
        return simplex_phase_one(n, &cs);
    };
    let d = k.len();
    let mut cs = Vec::new();
    for c in constraints.iter().filter(|c| c.rel != Relation::Eq) {
        let coeffs: Vec<BigRational> = k
            .iter()
            .map(|v| c.coeffs.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        let pc = Constraint::new(coeffs, c.rel);
        if pc.is_trivial() {
            if pc.rel == Relation::Gt {
                return None;
            }
            continue;
        }
        cs.push(pc.normalized());
    }
    dedup(&mut cs);
    let y = simplex_phase_one(d, &cs)?;
    let mut x = vec![BigRational::zero(); n];
    for (yi, v) in y.iter().zip(&k) {
        for (xj, vj) in x.iter_mut().zip(v) {
            *xj += yi * vj;
        }
    }
    debug_assert!(all_hold(constraints, &x));
    Some(x)
}

fn simplex_phase_one(n: usize, constraints: &[Constraint]) -> Option<Vec<BigRational>> {
    if constraints.iter().all(|c| c.rel != Relation::Gt) {
        return Some(vec![BigRational::zero(); n]);
    }
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    // Columns: x+ (n), x- (n), slacks, artificials (m), rhs.
    let n_cols = 2 * n + n_slack + m;
    let mut tab: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n_cols + 1]; m];
    let mut s = 0;
    for (i, c) in constraints.iter().enumerate() {
        for j in 0..n {
            tab[i][j] = c.coeffs[j].clone();
            tab[i][n + j] = -c.coeffs[j].clone();
        }
        if c.rel != Relation::Eq {
            tab[i][2 * n + s] = -BigRational::one();
            s += 1;
        }
        if c.rel == Relation::Gt {
            tab[i][n_cols] = BigRational::one();
        }
        tab[i][2 * n + n_slack + i] = BigRational::one();
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * n + n_slack + i).collect();
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![BigRational::zero(); n_cols + 1];
    for row in &tab {
        for j in 0..2 * n + n_slack {
            cost[j] -= &row[j];
        }
        cost[n_cols] -= &row[n_cols];
    }
    while let Some(e) = (0..n_cols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if tab[i][e].is_positive() {
                let ratio = &tab[i][n_cols] / &tab[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase one is bounded");
        let piv = tab[r][e].clone();
        for x in tab[r].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[e].is_zero() {
                let f = row[e].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        if !cost[e].is_zero() {
            let f = cost[e].clone();
            for (x, p) in cost.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        basis[r] = e;
    }
    if !cost[n_cols].is_zero() {
        return None;
    }
    let mut vals = vec![BigRational::zero(); n_cols];
    for (i, &b) in basis.iter().enumerate() {
        vals[b] = tab[i][n_cols].clone();
    }
    let x: Vec<BigRational> = (0..n).map(|j| &vals[j] - &vals[n + j]).collect();
    debug_assert!(all_hold(constraints, &x));
    Some(x)
}
