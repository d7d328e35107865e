use std::cmp::Ordering;
use std::fmt;

/// A power product `x_1^{e_1} ... x_v^{e_v}`.
///
/// The derived `Ord` is graded lexicographic with `x_1 > x_2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { degree, exps }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { degree: 0, exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { degree: 1, exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial {
            degree: other.degree - self.degree,
            exps: other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Drops variable `i`, which must have exponent zero for the result to be meaningful.
    pub fn remove_var(&self, i: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.remove(i);
        Monomial::new(exps)
    }

    pub fn insert_var(&self, i: usize, e: u32) -> Monomial {
        let mut exps = self.exps.clone();
        exps.insert(i, e);
        Monomial::new(exps)
    }

    /// Renders with the given variable names; `1` for the unit monomial.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Term orders on monomials. Both refine total degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    /// Used for display.
    #[default]
    Grlex,
    /// Used inside Gröbner routines.
    Grevlex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grlex => a.cmp(b),
            MonomialOrder::Grevlex => a.degree.cmp(&b.degree).then_with(|| {
                for (x, y) in a.exps.iter().zip(&b.exps).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

/// All monomials of total degree `d` in `v` variables, in descending `order`.
pub fn monomials_of_degree(v: usize, d: u32, order: MonomialOrder) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; v];
    fill(&mut exps, 0, d, &mut out);
    out.sort_by(|a, b| order.cmp(b, a));
    out
}

fn fill(exps: &mut Vec<u32>, i: usize, rest: u32, out: &mut Vec<Monomial>) {
    if i + 1 == exps.len() {
        exps[i] = rest;
        out.push(Monomial::new(exps.clone()));
        exps[i] = 0;
        return;
    }
    for e in (0..=rest).rev() {
        exps[i] = e;
        fill(exps, i + 1, rest - e, out);
    }
    exps[i] = 0;
}

/// All monomials of degree `< bound`, ascending by degree and descending grlex within a degree.
pub fn monomials_below(v: usize, bound: u32) -> Vec<Monomial> {
    (0..bound)
        .flat_map(|d| monomials_of_degree(v, d, MonomialOrder::Grlex))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::binomial;

    #[test]
    fn degree_one_in_two_vars() {
        let ms = monomials_of_degree(2, 1, MonomialOrder::Grlex);
        assert_eq!(ms, vec![Monomial::var(2, 0), Monomial::var(2, 1)]);
    }

    #[test]
    fn constant_monomial() {
        assert_eq!(monomials_of_degree(3, 0, MonomialOrder::Grlex), vec![Monomial::one(3)]);
    }

    #[test]
    fn counts_match_binomials() {
        for v in 1..=6usize {
            for d in 0..=8u32 {
                let n = monomials_of_degree(v, d, MonomialOrder::Grevlex).len() as u64;
                assert_eq!(n, binomial(v as u64 + d as u64 - 1, d as u64), "v={v} d={d}");
            }
        }
        assert_eq!(monomials_of_degree(5, 2, MonomialOrder::Grlex).len(), 15);
    }

    #[test]
    fn grevlex_differs_from_grlex() {
        // x*z^2 vs y^3 in three variables: grlex puts x z^2 first, grevlex puts y^3 first.
        let a = Monomial::new(vec![1, 0, 2]);
        let b = Monomial::new(vec![0, 3, 0]);
        assert_eq!(MonomialOrder::Grlex.cmp(&a, &b), Ordering::Greater);
        assert_eq!(MonomialOrder::Grevlex.cmp(&a, &b), Ordering::Less);
    }

    #[test]
    fn division() {
        let a = Monomial::new(vec![1, 2]);
        let b = Monomial::new(vec![3, 2]);
        assert_eq!(a.quotient_of(&b), Some(Monomial::new(vec![2, 0])));
        assert_eq!(b.quotient_of(&a), None);
    }
}
