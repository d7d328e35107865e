//! Buchberger's algorithm for submodules of `K[x]^r` under position-over-term orders.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::module::FreeModuleElement;
use crate::algebra::{Monomial, MonomialOrder, Polynomial, Rational};
use crate::error::{Error, Result};

/// Module term order: position first (lower index dominates), then the monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModuleOrder {
    pub term: MonomialOrder,
}

impl ModuleOrder {
    pub fn position_over_term(term: MonomialOrder) -> Self {
        ModuleOrder { term }
    }
}

impl Default for ModuleOrder {
    fn default() -> Self {
        ModuleOrder { term: MonomialOrder::Grevlex }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Key {
    pos: usize,
    mono: Monomial,
    order: MonomialOrder,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.pos.cmp(&self.pos).then_with(|| self.order.cmp(&self.mono, &other.mono))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type MPoly = BTreeMap<Key, Rational>;

fn lead(p: &MPoly) -> (&Key, &Rational) {
    p.last_key_value().expect("leading term of zero")
}

fn add_term(p: &mut MPoly, k: Key, c: Rational) {
    if c.is_zero() {
        return;
    }
    match p.entry(k) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

fn to_mpoly(v: &FreeModuleElement, order: MonomialOrder) -> MPoly {
    let mut out = MPoly::new();
    for (pos, comp) in v.comps().iter().enumerate() {
        for (m, c) in comp.terms() {
            out.insert(Key { pos, mono: m.clone(), order }, c.clone());
        }
    }
    out
}

fn from_mpoly(p: &MPoly, rank: usize, nvars: usize) -> FreeModuleElement {
    let mut comps = vec![Polynomial::zero(nvars); rank];
    for (k, c) in p {
        comps[k.pos].add_term(k.mono.clone(), c.clone());
    }
    FreeModuleElement::new(comps).expect("positive rank")
}

fn make_monic(p: &mut MPoly) {
    let lc = lead(p).1.clone();
    if !lc.is_one() {
        for c in p.values_mut() {
            *c /= &lc;
        }
    }
}

/// Subtracts `coef · mono · g` from `p`.
fn sub_multiple(p: &mut MPoly, g: &MPoly, mono: &Monomial, coef: &Rational) {
    for (k, c) in g {
        add_term(p, Key { pos: k.pos, mono: k.mono.mul(mono), order: k.order }, -(coef * c));
    }
}

/// Full reduction of `p` modulo `basis` (every term, not only the leading one).
fn reduce(mut p: MPoly, basis: &[MPoly]) -> MPoly {
    let mut rem = MPoly::new();
    while let Some((k, c)) = p.pop_last() {
        let divisor = basis.iter().find(|g| {
            let (lk, _) = lead(g);
            lk.pos == k.pos && lk.mono.divides(&k.mono)
        });
        match divisor {
            Some(g) => {
                let (lk, lc) = lead(g);
                let q = lk.mono.quotient_of(&k.mono).expect("divides");
                let f = &c / lc;
                // The leading term cancels against the popped term.
                let mut iter = g.iter().rev();
                iter.next();
                for (gk, gc) in iter {
                    add_term(&mut p, Key { pos: gk.pos, mono: gk.mono.mul(&q), order: gk.order }, -(&f * gc));
                }
            }
            None => {
                rem.insert(k, c);
            }
        }
    }
    rem
}

fn s_vector(a: &MPoly, b: &MPoly) -> MPoly {
    let (ka, ca) = lead(a);
    let (kb, cb) = lead(b);
    let l = ka.mono.lcm(&kb.mono);
    let qa = ka.mono.quotient_of(&l).expect("lcm");
    let qb = kb.mono.quotient_of(&l).expect("lcm");
    let mut s = MPoly::new();
    sub_multiple(&mut s, a, &qa, &(-Rational::one() / ca));
    sub_multiple(&mut s, b, &qb, &(Rational::one() / cb));
    s
}

/// A Gröbner basis of a submodule of `K[x]^rank`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    rank: usize,
    nvars: usize,
    order: ModuleOrder,
    polys: Vec<MPoly>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> Vec<FreeModuleElement> {
        self.polys.iter().map(|p| from_mpoly(p, self.rank, self.nvars)).collect()
    }

    pub fn order(&self) -> ModuleOrder {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn normal_form(&self, v: &FreeModuleElement) -> FreeModuleElement {
        assert_eq!(v.rank(), self.rank, "rank mismatch");
        from_mpoly(&reduce(to_mpoly(v, self.order.term), &self.polys), self.rank, self.nvars)
    }

    pub fn contains(&self, v: &FreeModuleElement) -> bool {
        self.normal_form(v).is_zero()
    }

    /// Checks the Buchberger criterion directly.
    pub fn is_groebner(&self) -> bool {
        for i in 0..self.polys.len() {
            for j in i + 1..self.polys.len() {
                if lead(&self.polys[i]).0.pos == lead(&self.polys[j]).0.pos
                    && !reduce(s_vector(&self.polys[i], &self.polys[j]), &self.polys).is_empty()
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Buchberger's algorithm with the chain criterion and, for ideals, the coprime criterion.
pub fn groebner_basis(gens: &[FreeModuleElement], order: ModuleOrder) -> Result<GroebnerBasis> {
    let first = gens.first().ok_or_else(|| Error::Arity("no generators".into()))?;
    let (rank, nvars) = (first.rank(), first.nvars());
    if let Some(g) = gens.iter().find(|g| g.rank() != rank || g.nvars() != nvars) {
        return Err(Error::Ambient(format!("generator of rank {} in {} variables", g.rank(), g.nvars())));
    }
    let mut basis: Vec<MPoly> = Vec::new();
    for g in gens {
        let mut p = reduce(to_mpoly(g, order.term), &basis);
        if !p.is_empty() {
            make_monic(&mut p);
            basis.push(p);
        }
    }
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let pair_key = |b: &[MPoly], i: usize, j: usize| -> Option<(u32, usize, usize)> {
        let (ki, kj) = (lead(&b[i]).0, lead(&b[j]).0);
        (ki.pos == kj.pos).then(|| (ki.mono.lcm(&kj.mono).degree(), i, j))
    };
    for j in 0..basis.len() {
        for i in 0..j {
            if let Some(k) = pair_key(&basis, i, j) {
                pairs.insert(k);
            }
        }
    }
    let mut live: BTreeSet<(usize, usize)> = pairs.iter().map(|&(_, i, j)| (i, j)).collect();
    while let Some((deg, i, j)) = pairs.pop_first() {
        live.remove(&(i, j));
        let (ki, kj) = (lead(&basis[i]).0.clone(), lead(&basis[j]).0.clone());
        if rank == 1 && ki.mono.is_coprime(&kj.mono) {
            continue;
        }
        let l = ki.mono.lcm(&kj.mono);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lead(&basis[k]).0.pos == ki.pos
                && lead(&basis[k]).0.mono.divides(&l)
                && !live.contains(&(i.min(k), i.max(k)))
                && !live.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let _ = deg;
        let mut r = reduce(s_vector(&basis[i], &basis[j]), &basis);
        if r.is_empty() {
            continue;
        }
        make_monic(&mut r);
        basis.push(r);
        let n = basis.len() - 1;
        for i in 0..n {
            if let Some(k) = pair_key(&basis, i, n) {
                pairs.insert(k);
                live.insert((i, n));
            }
        }
    }
    Ok(GroebnerBasis { rank, nvars, order, polys: interreduce(basis) })
}

fn interreduce(basis: Vec<MPoly>) -> Vec<MPoly> {
    // Drop elements whose leading term is divisible by another's.
    let mut keep: Vec<MPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let (kg, _) = lead(g);
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let (kh, _) = lead(h);
            j != i && kh.pos == kg.pos && kh.mono.divides(&kg.mono) && (kh.mono != kg.mono || j < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<MPoly> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let mut g = keep[i].clone();
        let (k, c) = g.pop_last().expect("nonzero");
        let mut tail = reduce(g, &others);
        tail.insert(k, c);
        make_monic(&mut tail);
        out.push(tail);
    }
    out.sort_by(|a, b| lead(a).0.cmp(lead(b).0));
    out
}

/// Ideal Gröbner basis of polynomials (rank-one module).
pub fn ideal_basis(gens: &[Polynomial], order: MonomialOrder) -> Result<GroebnerBasis> {
    let elems: Vec<FreeModuleElement> = gens
        .iter()
        .map(|g| FreeModuleElement::new(vec![g.clone()]))
        .collect::<Result<_>>()?;
    groebner_basis(&elems, ModuleOrder::position_over_term(order))
}

/// Generators of `{α : Σ αᵢ gensᵢ = 0}` via a Gröbner basis of the rows `(gᵢ, eᵢ)`.
pub fn syzygy_basis(gens: &[Polynomial]) -> Result<Vec<Vec<Polynomial>>> {
    let first = gens.first().ok_or_else(|| Error::Arity("no generators".into()))?;
    let n = first.nvars();
    let m = gens.len();
    let rows: Vec<FreeModuleElement> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut comps = vec![Polynomial::zero(n); m + 1];
            comps[0] = g.clone();
            comps[i + 1] = Polynomial::one(n);
            FreeModuleElement::new(comps)
        })
        .collect::<Result<_>>()?;
    let gb = groebner_basis(&rows, ModuleOrder::default())?;
    let syz: Vec<Vec<Polynomial>> = gb
        .generators()
        .into_iter()
        .filter(|v| v.comp(0).is_zero())
        .map(|v| v.into_comps().into_iter().skip(1).collect())
        .collect();
    for s in &syz {
        let total = s.iter().zip(gens).fold(Polynomial::zero(n), |acc, (a, g)| &acc + &(a * g));
        if !total.is_zero() {
            return Err(Error::Consistency("syzygy fails to annihilate the generators".into()));
        }
    }
    Ok(syz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::polymodule::jet::{jet_span, JetSubspace};
    use crate::algebra::JetTruncation;
    use proptest::prelude::*;

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn elem(p: Polynomial) -> FreeModuleElement {
        FreeModuleElement::new(vec![p]).unwrap()
    }

    #[test]
    fn maximal_ideal() {
        let gb = ideal_basis(&[v(2, 0), v(2, 1)], MonomialOrder::Grevlex).unwrap();
        assert_eq!(gb.normal_form(&elem(Polynomial::one(2))), elem(Polynomial::one(2)));
        assert!(gb.contains(&elem(v(2, 0))));
    }

    #[test]
    fn principal_ideal() {
        let gb = ideal_basis(&[v(1, 0).pow(2)], MonomialOrder::Grevlex).unwrap();
        assert_eq!(gb.generators(), vec![elem(v(1, 0).pow(2))]);
        assert!(gb.contains(&elem(v(1, 0).pow(3))));
    }

    #[test]
    fn koszul_syzygy() {
        let syz = syzygy_basis(&[v(2, 0), v(2, 1)]).unwrap();
        assert_eq!(syz.len(), 1);
        let s = &syz[0];
        assert!(s[0] == v(2, 1) && s[1] == -v(2, 0) || s[0] == -v(2, 1) && s[1] == v(2, 0));
    }

    #[test]
    fn syzygy_of_powers_contains_x_minus_one() {
        let x = v(1, 0);
        let syz = syzygy_basis(&[x.pow(2), x.pow(3)]).unwrap();
        // The syzygy module is free of rank one, generated by ±(x, -1).
        assert_eq!(syz.len(), 1);
        let target = [x.clone(), Polynomial::constant(1, int(-1))];
        assert!(syz[0] == target || syz[0] == [-x.clone(), Polynomial::one(1)]);
    }

    #[test]
    fn divisibility_by_a_variable() {
        // Combinations α·(x + y^2) + β·y with x | α(x+y^2) + βy: the syzygies of (x+y^2, y, x).
        let (x, y) = (v(2, 0), v(2, 1));
        let gens = [&x + &y.pow(2), y.clone(), x.clone()];
        let syz = syzygy_basis(&gens).unwrap();
        // (1, -y, -1) is a syzygy: (x+y^2) - y*y - x = 0.
        let witness = FreeModuleElement::new(vec![Polynomial::one(2), -y.clone(), -Polynomial::one(2)]).unwrap();
        let module: Vec<FreeModuleElement> = syz.iter().map(|s| FreeModuleElement::new(s.clone()).unwrap()).collect();
        let gb = groebner_basis(&module, ModuleOrder::default()).unwrap();
        assert!(gb.contains(&witness));
    }

    fn small_poly(n: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -2i64..3), 1..4).prop_map(move |ts| {
            Polynomial::from_terms(n, ts.into_iter().map(|(e, c)| (Monomial::new(e), int(c))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn syzygies_annihilate(gens in prop::collection::vec(small_poly(2), 1..4)) {
            prop_assume!(gens.iter().any(|g| !g.is_zero()));
            let syz = syzygy_basis(&gens).unwrap();
            for s in syz {
                let total = s.iter().zip(&gens).fold(Polynomial::zero(2), |acc, (a, g)| &acc + &(a * g));
                prop_assert!(total.is_zero());
            }
        }

        #[test]
        fn basis_is_groebner_and_membership_agrees_with_row_reduction(
            gens in prop::collection::vec(small_poly(2), 1..3),
            probe in small_poly(2),
        ) {
            prop_assume!(gens.iter().all(|g| !g.is_zero()));
            let gb = ideal_basis(&gens, MonomialOrder::Grevlex).unwrap();
            prop_assert!(gb.is_groebner());
            // Global membership implies membership in every truncated span of multiples.
            let member = gens.iter().fold(Polynomial::zero(2), |acc, g| &acc + &(g * &probe));
            prop_assert!(gb.contains(&elem(member.clone())));
            let t = JetTruncation::new(6);
            let mults: Vec<FreeModuleElement> = gens.iter().flat_map(|g| {
                crate::algebra::monomials_below(2, 6).into_iter().map(move |m| elem(g.mul_monomial(&m, &int(1))))
            }).collect();
            let span: JetSubspace = jet_span(&mults, t).unwrap();
            prop_assert!(span.contains(&elem(member)).unwrap());
        }
    }
}
