//! Removal of nondegenerate quadratic suspensions.
//!
//! A branch in the normal form `(x_1, ..., x_{p-1}, g(x, y) + Σ c_j u_j²)` with all `c_j ≠ 0`
//! has the same liftable fields as its core `(x_1, ..., x_{p-1}, g(x, y))`.

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{format_rational, Monomial, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{Branch, MultiGerm};

#[derive(Clone, Debug)]
pub struct ReducedGerm {
    pub core: MultiGerm,
    /// Per branch, the coefficients `c_j` of the removed squares.
    pub quadratic: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionSummary {
    pub removed_variables: usize,
    pub quadratic: Vec<Vec<String>>,
}

impl ReducedGerm {
    pub fn summary(&self) -> ReductionSummary {
        ReductionSummary {
            removed_variables: self.quadratic.first().map(Vec::len).unwrap_or(0),
            quadratic: self.quadratic.iter().map(|q| q.iter().map(format_rational).collect()).collect(),
        }
    }
}

fn reduce_branch(b: &Branch, p: usize) -> Result<(Branch, Vec<Rational>)> {
    let n = b.n();
    let comps = b.components();
    for (q, c) in comps.iter().take(p - 1).enumerate() {
        if *c != Polynomial::var(n, q) {
            return Err(Error::NotRiegerRuas(format!("branch {}: component {} is not the coordinate {}", b.label(), q + 1, b.source_vars()[q])));
        }
    }
    let last = &comps[p - 1];
    let mut coeffs = vec![Rational::zero(); n - p];
    let mut core = Polynomial::zero(p);
    for (m, c) in last.terms() {
        let extra: Vec<usize> = (p..n).filter(|&j| m.exp(j) > 0).collect();
        match extra.as_slice() {
            [] => core.add_term(Monomial::new(m.exps()[..p].to_vec()), c.clone()),
            [j] if m.degree() == 2 && m.exp(*j) == 2 => coeffs[j - p] = c.clone(),
            _ => {
                return Err(Error::NotRiegerRuas(format!(
                    "branch {}: term {} mixes suspension variables with the core",
                    b.label(),
                    m.render(b.source_vars())
                )))
            }
        }
    }
    if let Some(j) = coeffs.iter().position(Zero::is_zero) {
        return Err(Error::NotRiegerRuas(format!("branch {}: {} has no square term", b.label(), b.source_vars()[p + j])));
    }
    let core_branch = Branch::new(b.label(), b.source_vars()[..p].to_vec(), comps[..p - 1].iter().map(|c| truncate_vars(c, p)).chain([core]).collect())?;
    Ok((core_branch, coeffs))
}

fn truncate_vars(c: &Polynomial, p: usize) -> Polynomial {
    Polynomial::from_terms(p, c.terms().map(|(m, c)| (Monomial::new(m.exps()[..p].to_vec()), c.clone())))
}

/// Strips the quadratic suspension variables `x_{p+1}, ..., x_n` from every branch.
pub fn reduce_to_core(f: &MultiGerm) -> Result<ReducedGerm> {
    let (n, p) = (f.n(), f.p());
    if n < p {
        return Err(Error::NotRiegerRuas(format!("source dimension {n} is below target dimension {p}")));
    }
    if n == p {
        return Ok(ReducedGerm { core: f.clone(), quadratic: vec![Vec::new(); f.branch_count()] });
    }
    let (branches, quadratic): (Vec<_>, Vec<_>) = f.branches().iter().map(|b| reduce_branch(b, p)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(ReducedGerm { core: MultiGerm::new(f.target_vars().to_vec(), branches)?, quadratic })
}
