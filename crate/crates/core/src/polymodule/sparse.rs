//! Fraction-free sparse Gaussian elimination over the integers.
//!
//! Rows are sorted `(column, value)` lists with no zero values. Every stored row is
//! primitive with a positive leading entry, and its leading column is its pivot; no two
//! stored rows share a pivot. Later columns of a stored row may hold other pivots
//! (semi-echelon form); [`Echelon::rref`] produces the fully reduced form on demand.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

pub type Row = Vec<(usize, BigInt)>;
pub type RatRow = Vec<(usize, Rational)>;

const NO_PIVOT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<Row>,
    pivot_row: Vec<u32>,
}

/// `a*v - b*w`, assuming both are sorted by column.
fn combine(v: &Row, a: &BigInt, w: &Row, b: &BigInt) -> Row {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    let a_one = a.is_one();
    while i < v.len() || j < w.len() {
        let take_v = j >= w.len() || (i < v.len() && v[i].0 < w[j].0);
        let take_w = i >= v.len() || (j < w.len() && w[j].0 < v[i].0);
        if take_v {
            let val = if a_one { v[i].1.clone() } else { &v[i].1 * a };
            out.push((v[i].0, val));
            i += 1;
        } else if take_w {
            out.push((w[j].0, -(&w[j].1 * b)));
            j += 1;
        } else {
            let val = if a_one { v[i].1.clone() } else { &v[i].1 * a } - &w[j].1 * b;
            if !val.is_zero() {
                out.push((v[i].0, val));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn content(v: &Row) -> BigInt {
    let mut g = BigInt::zero();
    for (_, x) in v {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides by the content and makes the leading entry positive.
pub fn make_primitive(v: &mut Row) {
    if v.is_empty() {
        return;
    }
    let mut g = content(v);
    if v[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, x) in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Scales a rational row to an integer row; returns it with the scale factor used.
pub fn to_int_row(v: &[(usize, Rational)]) -> (Row, BigInt) {
    let den = v.iter().fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
    let row = v
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(c, q)| (*c, q.numer() * (&den / q.denom())))
        .collect();
    (row, den)
}

/// Sorts by column and merges duplicates.
pub fn normalize_rat(mut v: Vec<(usize, Rational)>) -> RatRow {
    v.sort_by_key(|(c, _)| *c);
    let mut out: RatRow = Vec::with_capacity(v.len());
    for (c, q) in v {
        match out.last_mut() {
            Some((lc, lq)) if *lc == c => *lq += q,
            _ => out.push((c, q)),
        }
    }
    out.retain(|(_, q)| !q.is_zero());
    out
}

pub fn normalize_int(mut v: Vec<(usize, BigInt)>) -> Row {
    v.sort_by_key(|(c, _)| *c);
    let mut out: Row = Vec::with_capacity(v.len());
    for (c, q) in v {
        match out.last_mut() {
            Some((lc, lq)) if *lc == c => *lq += q,
            _ => out.push((c, q)),
        }
    }
    out.retain(|(_, q)| !q.is_zero());
    out
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivot_row: vec![NO_PIVOT; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col] != NO_PIVOT
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }

    /// Columns that are not pivots, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| !self.is_pivot(c)).collect()
    }

    /// Reduces `v` against the stored rows. Returns `(w, s)` with `w / s` equal to
    /// `v` minus a combination of stored rows, and `w` zero on every pivot column.
    pub fn reduce(&self, mut v: Row) -> (Row, BigInt) {
        let mut scale = BigInt::one();
        let mut pos = 0;
        while pos < v.len() {
            let col = v[pos].0;
            debug_assert!(col < self.dim, "column {col} outside dimension {}", self.dim);
            let r = self.pivot_row[col];
            if r == NO_PIVOT {
                pos += 1;
                continue;
            }
            let row = &self.rows[r as usize];
            let p = &row[0].1;
            let c = &v[pos].1;
            let g = p.gcd(c);
            let a = p / &g;
            let b = c / &g;
            v = combine(&v, &a, row, &b);
            if !a.is_one() {
                scale *= &a;
            }
        }
        if !scale.is_one() && !v.is_empty() {
            let g = content(&v).gcd(&scale);
            if !g.is_one() {
                for (_, x) in v.iter_mut() {
                    *x /= &g;
                }
                scale /= &g;
            }
        } else if v.is_empty() {
            scale = BigInt::one();
        }
        (v, scale)
    }

    /// Reduces a rational row exactly.
    pub fn reduce_rat(&self, v: &[(usize, Rational)]) -> RatRow {
        let (row, den) = to_int_row(v);
        let (w, s) = self.reduce(row);
        let d = den * s;
        w.into_iter().map(|(c, x)| (c, Rational::new(x, d.clone()))).collect()
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: Row) -> bool {
        let (w, _) = self.reduce(v);
        self.insert_reduced(w)
    }

    /// Adds a row that is already zero on every pivot column.
    pub fn insert_reduced(&mut self, mut w: Row) -> bool {
        if w.is_empty() {
            return false;
        }
        debug_assert!(!self.is_pivot(w[0].0));
        make_primitive(&mut w);
        self.pivot_row[w[0].0] = self.rows.len() as u32;
        self.rows.push(w);
        true
    }

    pub fn insert_rat(&mut self, v: &[(usize, Rational)]) -> bool {
        self.insert(to_int_row(v).0)
    }

    pub fn contains(&self, v: &Row) -> bool {
        self.reduce(v.clone()).0.is_empty()
    }

    pub fn contains_rat(&self, v: &[(usize, Rational)]) -> bool {
        self.contains(&to_int_row(v).0)
    }

    /// Reduced row-echelon basis: unit pivots, zero above and below every pivot,
    /// rows sorted by pivot column.
    pub fn rref(&self) -> Vec<RatRow> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.rows[r][0].0));
        let mut done: BTreeMap<usize, RatRow> = BTreeMap::new();
        for r in order {
            let row = &self.rows[r];
            let lead = Rational::from_integer(row[0].1.clone());
            let mut acc: BTreeMap<usize, Rational> =
                row.iter().map(|(c, x)| (*c, Rational::from_integer(x.clone()) / &lead)).collect();
            let cols: Vec<usize> = acc.keys().copied().skip(1).collect();
            for c in cols {
                if let Some(other) = done.get(&c) {
                    let factor = match acc.get(&c) {
                        Some(f) => f.clone(),
                        None => continue,
                    };
                    for (oc, ov) in other {
                        let e = acc.entry(*oc).or_insert_with(Rational::zero);
                        *e -= &factor * ov;
                        if e.is_zero() {
                            acc.remove(oc);
                        }
                    }
                }
            }
            done.insert(row[0].0, acc.into_iter().collect());
        }
        done.into_values().collect()
    }

    /// Basis of the null space of the stored rows viewed as equations in `dim` unknowns.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        let free = self.free_columns();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.dim];
                x[f] = Rational::one();
                for row in &rref {
                    if let Some((_, a)) = row.iter().find(|(c, _)| *c == f) {
                        x[row[0].0] = -a.clone();
                    }
                }
                x
            })
            .collect()
    }
}

/// Equations `A x = b` in `n` unknowns, accumulated row by row.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    n: usize,
    ech: Echelon,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem { n, ech: Echelon::new(n + 1), inconsistent: false }
    }

    pub fn unknowns(&self) -> usize {
        self.n
    }

    /// Adds `Σ coeffs x = rhs`. Returns `false` once the system has become inconsistent.
    pub fn add_equation(&mut self, coeffs: &[(usize, Rational)], rhs: &Rational) -> bool {
        let mut v: Vec<(usize, Rational)> = coeffs.to_vec();
        if !rhs.is_zero() {
            v.push((self.n, rhs.clone()));
        }
        let v = normalize_rat(v);
        if v.is_empty() {
            return !self.inconsistent;
        }
        let (row, _) = to_int_row(&v);
        let (w, _) = self.ech.reduce(row);
        if let Some((c, _)) = w.first() {
            if *c == self.n {
                self.inconsistent = true;
            }
        }
        self.ech.insert_reduced(w);
        !self.inconsistent
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// A solution with every free unknown set to zero.
    pub fn solution(&self) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); self.n];
        for row in self.ech.rref() {
            let pivot = row[0].0;
            if let Some((_, b)) = row.iter().find(|(c, _)| *c == self.n) {
                x[pivot] = b.clone();
            }
        }
        Some(x)
    }
}

/// Rank of a list of rational rows in a space of dimension `dim`.
pub fn rank_of(dim: usize, rows: &[RatRow]) -> usize {
    let mut e = Echelon::new(dim);
    for r in rows {
        e.insert_rat(r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use proptest::prelude::*;

    fn irow(v: &[(usize, i64)]) -> Row {
        v.iter().map(|(c, x)| (*c, BigInt::from(*x))).collect()
    }

    #[test]
    fn duplicate_rows_have_rank_one() {
        let mut e = Echelon::new(3);
        assert!(e.insert(irow(&[(0, 2), (2, 4)])));
        assert!(!e.insert(irow(&[(0, 1), (2, 2)])));
        assert_eq!(e.rank(), 1);
    }

    #[test]
    fn reduce_is_exact() {
        let mut e = Echelon::new(3);
        e.insert(irow(&[(0, 3), (1, 1)]));
        let r = e.reduce_rat(&[(0, int(1)), (2, int(1))]);
        // (1,0,1) - 1/3 (3,1,0) = (0,-1/3,1)
        assert_eq!(r, vec![(1, rat(-1, 3)), (2, int(1))]);
    }

    #[test]
    fn solves_and_detects_inconsistency() {
        let mut s = LinearSystem::new(2);
        s.add_equation(&[(0, int(1)), (1, int(1))], &int(3));
        s.add_equation(&[(0, int(1)), (1, int(-1))], &int(1));
        assert_eq!(s.solution().unwrap(), vec![int(2), int(1)]);
        assert!(!s.add_equation(&[(0, int(2)), (1, int(2))], &int(7)));
        assert!(s.solution().is_none());
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        let mut e = Echelon::new(3);
        e.insert(irow(&[(0, 1), (1, 2), (2, 3)]));
        let k = e.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(&v[0] + &v[1] * int(2) + &v[2] * int(3), int(0));
        }
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..7),
            scales in prop::collection::vec(1i64..5, 7),
        ) {
            let to_rat = |r: &Vec<i64>, s: i64| -> RatRow {
                r.iter().enumerate().filter(|(_, x)| **x != 0).map(|(c, x)| (c, rat(*x, s))).collect()
            };
            let a: Vec<RatRow> = rows.iter().map(|r| to_rat(r, 1)).collect();
            let mut b: Vec<RatRow> = rows.iter().zip(&scales).map(|(r, s)| to_rat(r, *s)).collect();
            b.reverse();
            prop_assert_eq!(rank_of(5, &a), rank_of(5, &b));
        }

        #[test]
        fn rref_spans_the_same_space(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..6)) {
            let mut e = Echelon::new(4);
            for r in &rows {
                e.insert(r.iter().enumerate().filter(|(_, x)| **x != 0).map(|(c, x)| (c, BigInt::from(*x))).collect());
            }
            let rref = e.rref();
            prop_assert_eq!(rref.len(), e.rank());
            for r in &rref {
                prop_assert!(e.contains_rat(r));
                prop_assert_eq!(&r[0].1, &int(1));
                for other in &rref {
                    if other[0].0 != r[0].0 {
                        prop_assert!(r.iter().all(|(c, _)| *c != other[0].0));
                    }
                }
            }
        }
    }
}
