//! The local algebra of one branch: `C / f*m₀ᵏ C` as exact finite-dimensional quotients.
//!
//! If `m^ℓ ⊆ f*m₀ C` then `m^{ℓk} ⊆ (f*m₀)^k = f*m₀ᵏ C`, so the k-th ideal power is
//! represented faithfully by its image in the jet space of order `ℓk`. Pivots are taken
//! at the lowest-degree column, which makes the surviving (standard) monomials a basis
//! of the quotient in the sense of a local degree ordering.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::algebra::{monomials_of_degree, Monomial, MonomialOrder, Polynomial};
use crate::error::{Error, Result};
use crate::germs::Branch;
use crate::polymodule::sparse::{normalize_int, normalize_rat, to_int_row, Echelon, RatRow, Row};

/// Monomials indexed by ascending degree; extended on demand.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    nvars: usize,
    monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    below: Vec<usize>,
}

impl MonomialIndex {
    pub fn new(nvars: usize) -> Self {
        MonomialIndex { nvars, monos: Vec::new(), index: HashMap::new(), below: vec![0] }
    }

    /// Makes every monomial of degree `< bound` addressable.
    pub fn ensure(&mut self, bound: u32) {
        while self.below.len() <= bound as usize {
            let d = (self.below.len() - 1) as u32;
            for m in monomials_of_degree(self.nvars, d, MonomialOrder::Grlex) {
                self.index.insert(m.clone(), self.monos.len());
                self.monos.push(m);
            }
            self.below.push(self.monos.len());
        }
    }

    /// Number of monomials of degree `< d`.
    pub fn count_below(&self, d: u32) -> usize {
        self.below[d as usize]
    }

    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn mono(&self, i: usize) -> &Monomial {
        &self.monos[i]
    }
}

#[derive(Clone, Debug)]
struct IdealPower {
    cutoff: u32,
    ech: Echelon,
    std: Vec<usize>,
    std_pos: HashMap<usize, usize>,
}

impl IdealPower {
    fn new(cutoff: u32, ech: Echelon) -> Self {
        let std = ech.free_columns();
        let std_pos = std.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        IdealPower { cutoff, ech, std, std_pos }
    }
}

fn integer_terms(p: &Polynomial) -> Vec<(Monomial, BigInt)> {
    let row: RatRow = p.terms().enumerate().map(|(i, (_, c))| (i, c.clone())).collect();
    let (ints, _) = to_int_row(&row);
    let monos: Vec<Monomial> = p.terms().map(|(m, _)| m.clone()).collect();
    ints.into_iter().map(|(i, c)| (monos[i].clone(), c)).collect()
}

/// Exact model of the local algebra of one branch and of its ideals `f*m₀ᵏ C`.
#[derive(Clone, Debug)]
pub struct BranchAlgebra {
    label: String,
    n: usize,
    comps_int: Vec<Vec<(Monomial, BigInt)>>,
    jac: Vec<Vec<Polynomial>>,
    ell: u32,
    delta: usize,
    index: MonomialIndex,
    powers: Vec<IdealPower>,
    level_bases: Vec<Option<Vec<RatRow>>>,
}

impl BranchAlgebra {
    /// Detects `ℓ` (least order with `m^ℓ ⊆ f*m₀C + m^{ℓ+1}`) and `δ = dim C/f*m₀C`.
    pub fn new(branch: &Branch, cap: u32) -> Result<Self> {
        let n = branch.n();
        let comps_int: Vec<_> = branch.components().iter().filter(|c| !c.is_zero()).map(integer_terms).collect();
        let mut alg = BranchAlgebra {
            label: branch.label().to_string(),
            n,
            comps_int,
            jac: branch.jacobian(),
            ell: 0,
            delta: 0,
            index: MonomialIndex::new(n),
            powers: Vec::new(),
            level_bases: Vec::new(),
        };
        let mut prev: Option<(usize, Echelon)> = None;
        for order in 1..=cap + 1 {
            let ech = alg.first_power_mod(order);
            let codim = alg.index.count_below(order) - ech.rank();
            if let Some((d, e)) = prev.take() {
                if d == codim {
                    alg.ell = order - 1;
                    alg.delta = d;
                    alg.powers.push(IdealPower::new(order - 1, e));
                    return Ok(alg);
                }
            }
            prev = Some((codim, ech));
        }
        Err(Error::NotFiniteMultiplicity { branch: alg.label.clone(), cap })
    }

    fn first_power_mod(&mut self, order: u32) -> Echelon {
        self.index.ensure(order);
        let mut ech = Echelon::new(self.index.count_below(order));
        let below = if order >= 1 { self.index.count_below(order - 1) } else { 0 };
        for col in 0..below {
            let unit: Row = vec![(col, BigInt::from(1))];
            for q in 0..self.comps_int.len() {
                let r = self.mul_int(&unit, q, order);
                ech.insert(r);
            }
        }
        ech
    }

    fn mul_int(&self, row: &Row, q: usize, cutoff: u32) -> Row {
        let f = &self.comps_int[q];
        let mut out = Vec::with_capacity(row.len() * f.len());
        for (c, x) in row {
            let m = self.index.mono(*c);
            for (fm, fc) in f {
                if m.degree() + fm.degree() >= cutoff {
                    continue;
                }
                let col = self.index.get(&m.mul(fm)).expect("index covers cutoff");
                out.push((col, x * fc));
            }
        }
        normalize_int(out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn powers_computed(&self) -> usize {
        self.powers.len()
    }

    /// Jet order at which `f*m₀ᵏ C` is represented: `ℓk`.
    pub fn cutoff(&self, k: usize) -> u32 {
        self.ell * k as u32
    }

    /// Computes `f*m₀ʲ C` for all `j <= k`.
    pub fn ensure_power(&mut self, k: usize) {
        while self.powers.len() < k {
            let k_new = self.powers.len() + 1;
            let cutoff = self.cutoff(k_new);
            let prev_cut = self.cutoff(k_new - 1);
            self.index.ensure(cutoff);
            let mut ech = Echelon::new(self.index.count_below(cutoff));
            let prev_rows: Vec<Row> = self.powers[k_new - 2].ech.rows().to_vec();
            for q in 0..self.comps_int.len() {
                // f*m₀^{k-1} = span(rows) + m^{ℓ(k-1)}.
                for r in &prev_rows {
                    ech.insert(self.mul_int(r, q, cutoff));
                }
                for col in self.index.count_below(prev_cut)..self.index.count_below(cutoff) {
                    ech.insert(self.mul_int(&vec![(col, BigInt::from(1))], q, cutoff));
                }
            }
            self.powers.push(IdealPower::new(cutoff, ech));
        }
    }

    /// `dim C / f*m₀ᵏ C` (zero for `k = 0`).
    pub fn quotient_dim(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.powers[k - 1].std.len()
        }
    }

    /// Standard monomials spanning `C / f*m₀ᵏ C`.
    pub fn standard_monomials(&self, k: usize) -> Vec<Monomial> {
        if k == 0 {
            return Vec::new();
        }
        self.powers[k - 1].std.iter().map(|c| self.index.mono(*c).clone()).collect()
    }

    /// Index columns of the standard monomials of `C / f*m₀ᵏ C`.
    pub fn standard_columns(&self, k: usize) -> &[usize] {
        if k == 0 {
            return &[];
        }
        &self.powers[k - 1].std
    }

    /// Coefficients of a polynomial as a row over the monomial index, truncated at `cutoff`.
    pub fn poly_row(&mut self, p: &Polynomial, cutoff: u32) -> RatRow {
        self.index.ensure(cutoff);
        let row = p
            .terms()
            .filter(|(m, _)| m.degree() < cutoff)
            .map(|(m, c)| (self.index.get(m).expect("ensured"), c.clone()))
            .collect();
        normalize_rat(row)
    }

    pub fn row_poly(&self, row: &RatRow) -> Polynomial {
        Polynomial::from_terms(self.n, row.iter().map(|(c, q)| (self.index.mono(*c).clone(), q.clone())))
    }

    /// Product of a row and a polynomial, truncated at `cutoff`.
    pub fn mul_row(&mut self, row: &RatRow, p: &Polynomial, cutoff: u32) -> RatRow {
        self.index.ensure(cutoff);
        let mut out = Vec::new();
        for (c, x) in row {
            let m = self.index.mono(*c).clone();
            for (pm, pc) in p.terms() {
                if m.degree() + pm.degree() >= cutoff {
                    continue;
                }
                out.push((self.index.get(&m.mul(pm)).expect("ensured"), x * pc));
            }
        }
        normalize_rat(out)
    }

    /// Coordinates of a row in `C / f*m₀ᵏ C`, indexed by standard-monomial position.
    pub fn normal_form_row(&self, k: usize, row: &RatRow) -> RatRow {
        if k == 0 {
            return Vec::new();
        }
        let pw = &self.powers[k - 1];
        let limit = self.index.count_below(pw.cutoff);
        let trimmed: RatRow = row.iter().filter(|(c, _)| *c < limit).cloned().collect();
        pw.ech
            .reduce_rat(&trimmed)
            .into_iter()
            .map(|(c, q)| (*pw.std_pos.get(&c).expect("reduced rows live on standard monomials"), q))
            .collect()
    }

    pub fn normal_form(&mut self, k: usize, p: &Polynomial) -> RatRow {
        if k == 0 {
            return Vec::new();
        }
        let cutoff = self.powers[k - 1].cutoff;
        let row = self.poly_row(p, cutoff);
        self.normal_form_row(k, &row)
    }

    /// Polynomials (as index rows) whose classes form a basis of `f*m₀ⁱC / f*m₀^{i+1}C`.
    pub fn level_basis(&mut self, i: usize) -> Result<Vec<RatRow>> {
        self.ensure_power(i + 1);
        if self.level_bases.len() <= i {
            self.level_bases.resize(i + 1, None);
        }
        if let Some(b) = &self.level_bases[i] {
            return Ok(b.clone());
        }
        let candidates: Vec<RatRow> = if i == 0 {
            self.powers[0].std.iter().map(|c| vec![(*c, crate::algebra::int(1))]).collect()
        } else {
            let mut c: Vec<RatRow> = self.powers[i - 1]
                .ech
                .rows()
                .iter()
                .map(|r| r.iter().map(|(c, x)| (*c, crate::algebra::Rational::from_integer(x.clone()))).collect())
                .collect();
            let (lo, hi) = (self.index.count_below(self.cutoff(i)), self.index.count_below(self.cutoff(i + 1)));
            c.extend((lo..hi).map(|col| vec![(col, crate::algebra::int(1))]));
            c
        };
        let mut ech = Echelon::new(self.quotient_dim(i + 1));
        let mut basis = Vec::new();
        for cand in candidates {
            let nf = self.normal_form_row(i + 1, &cand);
            if ech.insert_rat(&nf) {
                basis.push(cand);
            }
        }
        let expected = self.quotient_dim(i + 1) - self.quotient_dim(i);
        if basis.len() != expected {
            return Err(Error::Consistency(format!(
                "branch {}: level {i} quotient has {} basis elements, expected {expected}",
                self.label,
                basis.len()
            )));
        }
        self.level_bases[i] = Some(basis.clone());
        Ok(basis)
    }

    /// `dim ker (ᵢt̄f_j)` by elimination.
    pub fn level_gamma(&mut self, i: usize) -> Result<usize> {
        let basis = self.level_basis(i)?;
        let a = self.quotient_dim(i + 1);
        let p = self.jac.first().map(Vec::len).unwrap_or(0);
        let cutoff = self.cutoff(i + 1);
        let mut ech = Echelon::new(a * p);
        for b in &basis {
            for m in 0..self.n {
                let mut v = Vec::new();
                for q in 0..p {
                    let prod = self.mul_row(b, &self.jac[m][q].clone(), cutoff);
                    v.extend(self.normal_form_row(i + 1, &prod).into_iter().map(|(c, x)| (q * a + c, x)));
                }
                ech.insert_rat(&v);
            }
        }
        Ok(self.n * basis.len() - ech.rank())
    }

    pub fn jacobian(&self) -> &[Vec<Polynomial>] {
        &self.jac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch(comps: Vec<Polynomial>) -> Branch {
        Branch::unnamed("s", comps).unwrap()
    }

    #[test]
    fn cusp_multiplicity() {
        let y = Polynomial::var(1, 0);
        let a = BranchAlgebra::new(&branch(vec![y.pow(2), y.pow(3)]), 10).unwrap();
        assert_eq!((a.ell(), a.delta()), (2, 2));
    }

    #[test]
    fn identity_multiplicity() {
        let a = BranchAlgebra::new(&branch(vec![Polynomial::var(1, 0)]), 10).unwrap();
        assert_eq!((a.ell(), a.delta()), (1, 1));
    }

    #[test]
    fn non_finite_multiplicity_is_reported() {
        // (x, 0) from the plane: the fibre is a line.
        let f = branch(vec![Polynomial::var(2, 0), Polynomial::zero(2)]);
        assert!(matches!(BranchAlgebra::new(&f, 8), Err(Error::NotFiniteMultiplicity { .. })));
    }

    #[test]
    fn higher_quotients_of_a_curve_germ() {
        // n = 1: every f*m₀ⁱ/f*m₀^{i+1} has dimension δ.
        let y = Polynomial::var(1, 0);
        let mut a = BranchAlgebra::new(&branch(vec![y.pow(2), y.pow(3)]), 10).unwrap();
        a.ensure_power(5);
        for k in 1..=5 {
            assert_eq!(a.quotient_dim(k), 2 * k);
        }
        for i in 0..4 {
            assert_eq!(a.level_basis(i).unwrap().len(), 2);
            assert_eq!(a.level_gamma(i).unwrap(), 1);
        }
    }

    #[test]
    fn whitney_umbrella_quotients() {
        // (x, y², xy): δ = 2, ₁δ = C(2,1)·2 = 4.
        let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let mut a = BranchAlgebra::new(&branch(vec![x.clone(), y.pow(2), &x * &y]), 10).unwrap();
        assert_eq!((a.ell(), a.delta()), (2, 2));
        a.ensure_power(3);
        assert_eq!(a.quotient_dim(2) - a.quotient_dim(1), 4);
        assert_eq!(a.quotient_dim(3) - a.quotient_dim(2), 6);
        assert_eq!(a.level_gamma(1).unwrap(), 2);
    }
}
