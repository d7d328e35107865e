use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// Work modulo all monomials of degree `>= order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JetTruncation {
    pub order: u32,
}

impl JetTruncation {
    pub fn new(order: u32) -> Self {
        JetTruncation { order }
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        p.truncate(self.order)
    }
}

/// Sparse multivariate polynomial over the rationals. No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest degree of a nonzero term; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += c;
                if v.is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCount(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.mul_truncated(other, None))
    }

    /// Product, dropping every term of degree `>= bound` when a bound is given.
    pub fn mul_truncated(&self, other: &Polynomial, bound: Option<u32>) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(b) = bound {
                    if ma.degree() + mb.degree() >= b {
                        continue;
                    }
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect(),
        }
    }

    pub fn pow_truncated(&self, e: u32, bound: Option<u32>) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars).truncate_opt(bound);
        for _ in 0..e {
            acc = acc.mul_truncated(self, bound);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        self.pow_truncated(e, None)
    }

    /// `self / d` when `d` divides `self` exactly, by leading-term reduction.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = d.terms.iter().next_back()?;
        let mut rest = self.clone();
        let mut q = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rest.terms.iter().next_back() {
            let t = lm.quotient_of(m)?;
            let c = c / lc;
            rest = &rest - &d.mul_monomial(&t, &c);
            q.add_term(t, c);
        }
        Some(q)
    }

    /// Drops all terms of degree `>= order`.
    pub fn truncate(&self, order: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() < order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    fn truncate_opt(self, bound: Option<u32>) -> Polynomial {
        match bound {
            Some(b) => self.truncate(b),
            None => self,
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Computes `self ∘ (comps)`: the pullback of a polynomial in `comps.len()` variables.
    pub fn substitute(&self, comps: &[Polynomial], trunc: Option<JetTruncation>) -> Result<Polynomial> {
        if comps.len() != self.nvars {
            return Err(Error::Arity(format!(
                "substituting {} components into a polynomial in {} variables",
                comps.len(),
                self.nvars
            )));
        }
        let target_vars = match comps.first() {
            Some(c) => c.nvars,
            None => return Ok(self.clone()),
        };
        if let Some(c) = comps.iter().find(|c| c.nvars != target_vars) {
            return Err(Error::VariableCount(target_vars, c.nvars));
        }
        let bound = trunc.map(|t| t.order);
        let mut powers = PowerCache::new(comps, bound);
        let mut out = Polynomial::zero(target_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target_vars, c.clone()).truncate_opt(bound);
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul_truncated(powers.get(i, e), bound);
                }
                if term.is_zero() {
                    break;
                }
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Sets variable `i` to zero and removes it.
    pub fn eliminate_var_at_zero(&self, i: usize) -> Polynomial {
        Polynomial::from_terms(
            self.nvars - 1,
            self.terms.iter().filter(|(m, _)| m.exp(i) == 0).map(|(m, c)| (m.remove_var(i), c.clone())),
        )
    }

    /// Embeds into a ring with one more variable inserted at position `i`.
    pub fn insert_var(&self, i: usize) -> Polynomial {
        Polynomial::from_terms(self.nvars + 1, self.terms.iter().map(|(m, c)| (m.insert_var(i, 0), c.clone())))
    }

    /// Whether `var i` occurs in some term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    /// Canonical text: descending graded-lex order, `num/den` coefficients, unit coefficients elided.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&format_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&m.render(names));
            } else {
                out.push_str(&format_rational(&mag));
                out.push('*');
                out.push_str(&m.render(names));
            }
        }
        out
    }

    /// Renders with default names `x1..xn`.
    pub fn render_default(&self) -> String {
        self.render(&default_names("x", self.nvars))
    }
}

pub fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

struct PowerCache<'a> {
    comps: &'a [Polynomial],
    bound: Option<u32>,
    cache: Vec<Vec<Polynomial>>,
}

impl<'a> PowerCache<'a> {
    fn new(comps: &'a [Polynomial], bound: Option<u32>) -> Self {
        let cache = comps
            .iter()
            .map(|c| vec![Polynomial::one(c.nvars).truncate_opt(bound)])
            .collect();
        PowerCache { comps, bound, cache }
    }

    fn get(&mut self, i: usize, e: u32) -> &Polynomial {
        while self.cache[i].len() <= e as usize {
            let next = self.cache[i].last().unwrap().mul_truncated(&self.comps[i], self.bound);
            self.cache[i].push(next);
        }
        &self.cache[i][e as usize]
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("variable-count mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("variable-count mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("variable-count mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, int(v))
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(1, 0) + &c(1, 1)) * &(&x(1, 0) - &c(1, 1));
        assert_eq!(p, &x(1, 0).pow(2) - &c(1, 1));
    }

    #[test]
    fn rational_cancellation() {
        let p = x(1, 0).scale(&rat(3, 2)).scale(&rat(2, 3));
        assert_eq!(p, x(1, 0));
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(x(1, 0).checked_add(&x(2, 0)).is_err());
    }

    #[test]
    fn pullback_of_coordinates() {
        let y = x(1, 0);
        let f = [y.pow(2), y.pow(3)];
        let g = Polynomial::var(2, 1);
        assert_eq!(g.substitute(&f, None).unwrap(), y.pow(3));
        let gxy = &Polynomial::var(2, 0) * &Polynomial::var(2, 1);
        assert_eq!(gxy.substitute(&[y.pow(2), y.pow(3)], None).unwrap(), y.pow(5));
        assert!(g.substitute(std::slice::from_ref(&y), None).is_err());
    }

    #[test]
    fn inverse_shear_substitution() {
        // V evaluated on the inverse of (X,Y,U) -> (X - Y^k, Y, U) gives X + Y^k.
        let n = 3;
        let k = 2;
        let inv = [&x(n, 0) + &x(n, 1).pow(k), x(n, 1), x(n, 2)];
        assert_eq!(x(n, 0).substitute(&inv, None).unwrap(), &x(n, 0) + &x(n, 1).pow(k));
    }

    #[test]
    fn derivatives() {
        let (xx, yy) = (x(2, 0), x(2, 1));
        let p = &yy.pow(3) + &(&xx * &yy);
        assert_eq!(p.partial_derivative(1), &yy.pow(2).scale(&int(3)) + &xx);
        assert!(yy.pow(2).partial_derivative(0).is_zero());
        assert_eq!(yy.pow(2).partial_derivative(1), yy.scale(&int(2)));
    }

    #[test]
    fn rendering() {
        let names = vec!["X".to_string(), "Y".to_string()];
        let (xx, yy) = (x(2, 0), x(2, 1));
        let p = &(&xx * &yy).scale(&int(6)) - &(&xx.pow(2) * &yy.pow(2)).scale(&int(6));
        assert_eq!(p.render(&names), "-6*X^2*Y^2 + 6*X*Y");
        assert_eq!(c(2, 0).render(&names), "0");
        assert_eq!((&yy.scale(&rat(-3, 2)) + &c(2, 1)).render(&names), "-3/2*Y + 1");
    }

    fn small_poly(nvars: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, nvars), -3i64..4, 1i64..3), 0..5).prop_map(
            move |ts| Polynomial::from_terms(nvars, ts.into_iter().map(|(e, a, b)| (Monomial::new(e), rat(a, b)))),
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(2), b in small_poly(2), c in small_poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn pullback_is_multiplicative(g in small_poly(2), h in small_poly(2), f0 in small_poly(2), f1 in small_poly(2), m in 1u32..6) {
            let f = [f0, f1];
            let gh = (&g * &h).substitute(&f, None).unwrap();
            let prod = &g.substitute(&f, None).unwrap() * &h.substitute(&f, None).unwrap();
            prop_assert_eq!(&gh, &prod);
            let t = Some(JetTruncation::new(m));
            let ght = (&g * &h).substitute(&f, t).unwrap();
            let prodt = g.substitute(&f, t).unwrap().mul_truncated(&h.substitute(&f, t).unwrap(), Some(m));
            prop_assert_eq!(ght, prodt);
        }

        #[test]
        fn exact_division_inverts_products(a in small_poly(2), b in small_poly(2)) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
            if !(&a * &b).is_zero() {
                let bumped = &(&a * &b) + &Polynomial::var(2, 0).pow(9);
                prop_assert!(bumped.div_exact(&b).is_none() || b.len() == 1);
            }
        }

        #[test]
        fn truncation_composes(g in small_poly(3), a in 0u32..6, b in 0u32..6) {
            prop_assert_eq!(g.truncate(a).truncate(b), g.truncate(a.min(b)));
        }
    }
}
