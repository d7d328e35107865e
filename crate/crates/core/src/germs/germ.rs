use std::collections::HashSet;

use num_traits::Zero;

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::polymodule::sparse::rank_of;

/// The restriction of a multigerm to one source point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    label: String,
    source_vars: Vec<String>,
    components: Vec<Polynomial>,
}

impl Branch {
    /// Components must vanish at the origin.
    pub fn new(label: impl Into<String>, source_vars: Vec<String>, components: Vec<Polynomial>) -> Result<Self> {
        let label = label.into();
        let n = source_vars.len();
        if n == 0 {
            return Err(Error::InvalidGerm(format!("branch {label}: no source variables")));
        }
        for (q, c) in components.iter().enumerate() {
            if c.nvars() != n {
                return Err(Error::InvalidGerm(format!(
                    "branch {label}: component {} uses {} variables, expected {n}",
                    q + 1,
                    c.nvars()
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::InvalidGerm(format!(
                    "branch {label}: component {} has a nonzero constant term",
                    q + 1
                )));
            }
        }
        Ok(Branch { label, source_vars, components })
    }

    /// Branch with default source names `x1..xn`.
    pub fn unnamed(label: impl Into<String>, components: Vec<Polynomial>) -> Result<Self> {
        let n = components.first().map(Polynomial::nvars).unwrap_or(0);
        Self::new(label, crate::algebra::default_names("x", n), components)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source_vars(&self) -> &[String] {
        &self.source_vars
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.source_vars.len()
    }

    pub fn p(&self) -> usize {
        self.components.len()
    }

    /// Linear coefficients: row `q`, column `m` is `∂f_q/∂x_m (0)`.
    pub fn jacobian_at_zero(&self) -> Vec<Vec<Rational>> {
        self.components
            .iter()
            .map(|c| (0..self.n()).map(|m| c.partial_derivative(m).constant_term()).collect())
            .collect()
    }

    pub fn corank(&self) -> usize {
        let rows: Vec<Vec<(usize, Rational)>> = self
            .jacobian_at_zero()
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, q)| !q.is_zero()).collect())
            .collect();
        self.n() - rank_of(self.n(), &rows)
    }

    /// Partial derivatives: `[m][q] = ∂f_q/∂x_m`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        (0..self.n())
            .map(|m| self.components.iter().map(|c| c.partial_derivative(m)).collect())
            .collect()
    }

    /// `tf(ξ) = df · ξ` for a source field `ξ` with `n` components.
    pub fn tf(&self, xi: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(xi.len(), self.n(), "source field arity");
        let jac = self.jacobian();
        (0..self.p())
            .map(|q| {
                xi.iter()
                    .zip(&jac)
                    .fold(Polynomial::zero(self.n()), |acc, (x, col)| &acc + &(x * &col[q]))
            })
            .collect()
    }

    /// `η ∘ f` for a target field whose components are polynomials in `p` variables.
    pub fn pullback(&self, eta: &[Polynomial]) -> Result<Vec<Polynomial>> {
        eta.iter().map(|c| c.substitute(&self.components, None)).collect()
    }
}

/// A map-germ `(K^n, S) -> (K^p, 0)` given by one polynomial branch per source point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGerm {
    n: usize,
    p: usize,
    target_vars: Vec<String>,
    branches: Vec<Branch>,
}

impl MultiGerm {
    pub fn new(target_vars: Vec<String>, branches: Vec<Branch>) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::InvalidGerm("no branches".into()))?;
        let (n, p) = (first.n(), target_vars.len());
        if p == 0 {
            return Err(Error::InvalidGerm("target dimension must be positive".into()));
        }
        let mut labels = HashSet::new();
        for b in &branches {
            if b.n() != n {
                return Err(Error::InvalidGerm(format!("branch {}: source dimension {} differs from {n}", b.label, b.n())));
            }
            if b.p() != p {
                return Err(Error::InvalidGerm(format!("branch {}: {} components, expected {p}", b.label, b.p())));
            }
            if !labels.insert(b.label.clone()) {
                return Err(Error::InvalidGerm(format!("duplicate branch label {}", b.label)));
            }
        }
        Ok(MultiGerm { n, p, target_vars, branches })
    }

    /// Multigerm with default target names `X1..Xp` and branch labels `s1, s2, ...`.
    pub fn from_components(branches: Vec<Vec<Polynomial>>) -> Result<Self> {
        let p = branches.first().map(Vec::len).unwrap_or(0);
        let bs = branches
            .into_iter()
            .enumerate()
            .map(|(j, comps)| Branch::unnamed(format!("s{}", j + 1), comps))
            .collect::<Result<Vec<_>>>()?;
        Self::new(crate::algebra::default_names("X", p), bs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn target_vars(&self) -> &[String] {
        &self.target_vars
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Maximum over branches of `n − rank df(0)`.
    pub fn corank(&self) -> usize {
        self.branches.iter().map(Branch::corank).max().unwrap_or(0)
    }

    pub fn require_corank_one(&self) -> Result<()> {
        match self.corank() {
            c if c > 1 => Err(Error::Corank(c)),
            _ => Ok(()),
        }
    }

    pub fn with_target_vars(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::Arity(format!("{} target names for p = {}", names.len(), self.p)));
        }
        self.target_vars = names;
        Ok(self)
    }
}
