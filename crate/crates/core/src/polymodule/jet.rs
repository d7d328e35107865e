//! Finite-dimensional jet spaces `K[x]^r / m^M K[x]^r` and their subspaces.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::module::FreeModuleElement;
use super::sparse::{Echelon, RatRow};
use crate::algebra::{format_rational, monomials_below, JetTruncation, Monomial, Polynomial};
use crate::error::{Error, Result};

/// Coordinates on `K[x]^rank` modulo monomials of degree `>= trunc.order`.
///
/// Columns are ordered by monomial degree first, so pivots prefer low-order terms.
#[derive(Debug)]
pub struct JetAmbient {
    rank: usize,
    nvars: usize,
    trunc: JetTruncation,
    monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl JetAmbient {
    pub fn new(rank: usize, nvars: usize, trunc: JetTruncation) -> Self {
        let monos = monomials_below(nvars, trunc.order);
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        JetAmbient { rank, nvars, trunc, monos, index }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn trunc(&self) -> JetTruncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.rank * self.monos.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn col(&self, comp: usize, mono: &Monomial) -> Option<usize> {
        self.index.get(mono).map(|i| i * self.rank + comp)
    }

    pub fn vectorize(&self, v: &FreeModuleElement) -> Result<RatRow> {
        if v.rank() != self.rank || v.nvars() != self.nvars {
            return Err(Error::Ambient(format!(
                "element of rank {} in {} variables, ambient rank {} in {}",
                v.rank(),
                v.nvars(),
                self.rank,
                self.nvars
            )));
        }
        let mut row = Vec::new();
        for (q, comp) in v.comps().iter().enumerate() {
            for (m, c) in comp.terms() {
                if let Some(col) = self.col(q, m) {
                    row.push((col, c.clone()));
                }
            }
        }
        row.sort_by_key(|(c, _)| *c);
        Ok(row)
    }

    pub fn devectorize(&self, row: &RatRow) -> FreeModuleElement {
        let mut comps = vec![Polynomial::zero(self.nvars); self.rank];
        for (col, c) in row {
            comps[col % self.rank].add_term(self.monos[col / self.rank].clone(), c.clone());
        }
        FreeModuleElement::new(comps).expect("positive rank")
    }

    fn same(&self, other: &JetAmbient) -> bool {
        self.rank == other.rank && self.nvars == other.nvars && self.trunc == other.trunc
    }
}

/// A linear subspace of a jet space.
#[derive(Clone, Debug)]
pub struct JetSubspace {
    ambient: Arc<JetAmbient>,
    ech: Echelon,
}

/// Serializable presentation of a subspace: its reduced row-echelon basis.
#[derive(Clone, Debug, Serialize)]
pub struct JetSubspaceData {
    pub rank: usize,
    pub nvars: usize,
    pub order: u32,
    pub dimension: usize,
    /// Each basis row as sparse `(column, "num/den")` pairs.
    pub basis: Vec<Vec<(usize, String)>>,
}

/// Row-reduced span of the truncations of `vectors`.
pub fn jet_span(vectors: &[FreeModuleElement], trunc: JetTruncation) -> Result<JetSubspace> {
    let first = vectors.first().ok_or_else(|| Error::Arity("empty vector list".into()))?;
    let ambient = Arc::new(JetAmbient::new(first.rank(), first.nvars(), trunc));
    let mut s = JetSubspace::zero(ambient);
    for v in vectors {
        s.insert(v)?;
    }
    Ok(s)
}

impl JetSubspace {
    pub fn zero(ambient: Arc<JetAmbient>) -> Self {
        let dim = ambient.dim();
        JetSubspace { ambient, ech: Echelon::new(dim) }
    }

    pub fn ambient(&self) -> &Arc<JetAmbient> {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn insert(&mut self, v: &FreeModuleElement) -> Result<bool> {
        let row = self.ambient.vectorize(v)?;
        Ok(self.ech.insert_rat(&row))
    }

    pub fn contains(&self, v: &FreeModuleElement) -> Result<bool> {
        let row = self.ambient.vectorize(v)?;
        Ok(self.ech.contains_rat(&row))
    }

    fn check(&self, other: &JetSubspace) -> Result<()> {
        if !self.ambient.same(&other.ambient) {
            return Err(Error::Ambient("subspaces live in different jet spaces".into()));
        }
        Ok(())
    }

    pub fn basis(&self) -> Vec<FreeModuleElement> {
        self.ech.rref().iter().map(|r| self.ambient.devectorize(r)).collect()
    }

    pub fn sum(&self, other: &JetSubspace) -> Result<JetSubspace> {
        self.check(other)?;
        let mut out = self.clone();
        for r in other.ech.rows() {
            out.ech.insert(r.clone());
        }
        Ok(out)
    }

    /// Zassenhaus: rows `(a | a)` and `(b | 0)`; rows with vanishing left half span `A ∩ B`.
    pub fn intersection(&self, other: &JetSubspace) -> Result<JetSubspace> {
        self.check(other)?;
        let d = self.ambient.dim();
        let mut big = Echelon::new(2 * d);
        for r in self.ech.rows() {
            let mut row = r.clone();
            row.extend(r.iter().map(|(c, x)| (c + d, x.clone())));
            big.insert(row);
        }
        for r in other.ech.rows() {
            big.insert(r.clone());
        }
        let mut out = JetSubspace::zero(self.ambient.clone());
        for r in big.rows() {
            if r[0].0 >= d {
                out.ech.insert(r.iter().map(|(c, x)| (c - d, x.clone())).collect());
            }
        }
        Ok(out)
    }

    /// `dim (A + B) / B`.
    pub fn quotient_dim(&self, other: &JetSubspace) -> Result<usize> {
        Ok(self.sum(other)?.dim() - other.dim())
    }

    pub fn is_subspace_of(&self, other: &JetSubspace) -> Result<bool> {
        self.check(other)?;
        Ok(self.ech.rows().iter().all(|r| other.ech.contains(r)))
    }

    pub fn data(&self) -> JetSubspaceData {
        JetSubspaceData {
            rank: self.ambient.rank,
            nvars: self.ambient.nvars,
            order: self.ambient.trunc.order,
            dimension: self.dim(),
            basis: self
                .ech
                .rref()
                .iter()
                .map(|r| r.iter().map(|(c, q)| (*c, format_rational(q))).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use proptest::prelude::*;

    fn e1(p: Polynomial) -> FreeModuleElement {
        FreeModuleElement::basis(1, 0, p)
    }

    #[test]
    fn repeated_vector_spans_a_line() {
        let x = Polynomial::var(1, 0);
        let s = jet_span(&[e1(x.clone()), e1(x)], JetTruncation::new(3)).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn powers_below_the_cutoff() {
        let y = Polynomial::var(1, 0);
        let d = 4;
        let vs: Vec<_> = (0..8).map(|k| e1(y.pow(k))).collect();
        assert_eq!(jet_span(&vs, JetTruncation::new(d)).unwrap().dim(), d as usize);
    }

    #[test]
    fn tangent_space_of_the_cusp() {
        // tf(θ) + f*m·θ for f = (y², y³) at order 6: the quotient θ/that has dimension 3,
        // i.e. δ + γ where δ = 2 and γ = 1.
        let y = Polynomial::var(1, 0);
        let t = JetTruncation::new(6);
        let mut gens = Vec::new();
        for k in 0..6 {
            let yk = y.pow(k);
            gens.push(FreeModuleElement::new(vec![yk.mul_monomial(&Monomial::var(1, 0), &int(2)), (&yk * &y.pow(2)).scale(&int(3))]).unwrap());
            for q in 0..2 {
                gens.push(FreeModuleElement::basis(2, q, &yk * &y.pow(2)));
                gens.push(FreeModuleElement::basis(2, q, &yk * &y.pow(3)));
            }
        }
        let s = jet_span(&gens, t).unwrap();
        assert_eq!(s.ambient().dim() - s.dim(), 3);
    }

    #[test]
    fn self_intersection() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let a = jet_span(&[e1(x.clone()), e1(&x + &y)], JetTruncation::new(3)).unwrap();
        let i = a.intersection(&a).unwrap();
        assert_eq!(i.dim(), a.dim());
        assert!(i.is_subspace_of(&a).unwrap() && a.is_subspace_of(&i).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_reported() {
        let x = Polynomial::var(1, 0);
        let a = jet_span(&[e1(x.clone())], JetTruncation::new(3)).unwrap();
        let b = jet_span(&[e1(x)], JetTruncation::new(4)).unwrap();
        assert!(a.sum(&b).is_err());
    }

    fn random_space(seed: Vec<Vec<i64>>) -> JetSubspace {
        let amb = Arc::new(JetAmbient::new(1, 2, JetTruncation::new(3)));
        let mut s = JetSubspace::zero(amb.clone());
        for v in seed {
            let p = Polynomial::from_terms(2, amb.monomials().iter().cloned().zip(v.into_iter().map(int)));
            s.insert(&e1(p)).unwrap();
        }
        s
    }

    proptest! {
        #[test]
        fn dimension_formula(a in prop::collection::vec(prop::collection::vec(-2i64..3, 6), 0..5),
                             b in prop::collection::vec(prop::collection::vec(-2i64..3, 6), 0..5)) {
            let (a, b) = (random_space(a), random_space(b));
            let s = a.sum(&b).unwrap();
            let i = a.intersection(&b).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
            prop_assert!(i.is_subspace_of(&a).unwrap());
            prop_assert!(i.is_subspace_of(&b).unwrap());
            prop_assert_eq!(a.quotient_dim(&b).unwrap(), s.dim() - b.dim());
        }
    }
}
