use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::binomial;
use crate::error::{Error, Result};
use crate::germs::{BranchAlgebra, MultiGerm};

/// How a numeric invariant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantMode {
    /// Closed-form binomial identities in `n`, `δ` and `|S|`.
    Formula,
    /// Direct elimination in the local algebras.
    Bruteforce,
    /// Both were computed and agree.
    BothAgree,
}

/// Local algebras of all branches of a multigerm.
#[derive(Clone, Debug)]
pub struct GermAlgebra {
    n: usize,
    p: usize,
    branches: Vec<BranchAlgebra>,
}

impl GermAlgebra {
    /// Fails for corank above one or when some branch is not of finite multiplicity by `cap`.
    pub fn new(f: &MultiGerm, cap: u32) -> Result<Self> {
        f.require_corank_one()?;
        let branches = f.branches().iter().map(|b| BranchAlgebra::new(b, cap)).collect::<Result<Vec<_>>>()?;
        Ok(GermAlgebra { n: f.n(), p: f.p(), branches })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn branches(&self) -> &[BranchAlgebra] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branches_mut(&mut self) -> &mut [BranchAlgebra] {
        &mut self.branches
    }

    pub fn ensure_power(&mut self, k: usize) {
        for b in &mut self.branches {
            b.ensure_power(k);
        }
    }

    pub fn delta(&self) -> usize {
        self.branches.iter().map(BranchAlgebra::delta).sum()
    }

    /// `dim f*m₀ⁱC_S / f*m₀^{i+1}C_S` by elimination.
    pub fn level_delta(&mut self, i: usize) -> usize {
        self.ensure_power(i + 1);
        self.branches.iter().map(|b| b.quotient_dim(i + 1) - b.quotient_dim(i)).sum()
    }

    /// `dim ker ᵢt̄f` by elimination.
    pub fn level_gamma(&mut self, i: usize) -> Result<usize> {
        let mut total = 0;
        for b in &mut self.branches {
            total += b.level_gamma(i)?;
        }
        Ok(total)
    }

    fn level_factor(&self, i: usize) -> usize {
        binomial((self.n + i - 1) as u64, i as u64) as usize
    }

    pub fn formula_delta(&self, i: usize) -> usize {
        self.level_factor(i) * self.delta()
    }

    pub fn formula_gamma(&self, i: usize) -> usize {
        self.level_factor(i) * (self.delta() - self.branches.len())
    }

    /// `(ᵢδ, ᵢγ)` in the requested mode. `BothAgree` fails on any disagreement.
    pub fn level_invariants(&mut self, i: usize, mode: InvariantMode) -> Result<(usize, usize)> {
        match mode {
            InvariantMode::Formula => Ok((self.formula_delta(i), self.formula_gamma(i))),
            InvariantMode::Bruteforce => Ok((self.level_delta(i), self.level_gamma(i)?)),
            InvariantMode::BothAgree => {
                let brute = (self.level_delta(i), self.level_gamma(i)?);
                let formula = (self.formula_delta(i), self.formula_gamma(i));
                if brute != formula {
                    return Err(Error::Consistency(format!(
                        "level {i}: elimination gives (δ, γ) = {brute:?}, binomial identities give {formula:?}"
                    )));
                }
                Ok(brute)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchDelta {
    pub label: String,
    pub delta: usize,
    /// Least `ℓ` with `m^ℓ ⊆ f*m₀C + m^{ℓ+1}`.
    pub stable_order: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermInvariants {
    pub delta: usize,
    pub branches: Vec<BranchDelta>,
    pub gamma: usize,
    pub corank: usize,
    pub branch_count: usize,
    /// Jet order at which the quotient dimension was seen to stabilize (max over branches of `ℓ + 1`).
    pub finite_multiplicity_order: u32,
    pub i_delta: BTreeMap<usize, usize>,
    pub i_gamma: BTreeMap<usize, usize>,
    pub mode: InvariantMode,
}

impl GermInvariants {
    pub fn from_algebra(f: &MultiGerm, alg: &mut GermAlgebra, max_i: usize, mode: InvariantMode) -> Result<Self> {
        let mut i_delta = BTreeMap::new();
        let mut i_gamma = BTreeMap::new();
        for i in 0..=max_i {
            let (d, g) = alg.level_invariants(i, mode)?;
            i_delta.insert(i, d);
            i_gamma.insert(i, g);
        }
        Ok(GermInvariants {
            delta: alg.delta(),
            branches: alg
                .branches()
                .iter()
                .map(|b| BranchDelta { label: b.label().to_string(), delta: b.delta(), stable_order: b.ell() })
                .collect(),
            gamma: i_gamma[&0],
            corank: f.corank(),
            branch_count: f.branch_count(),
            finite_multiplicity_order: alg.branches().iter().map(|b| b.ell() + 1).max().unwrap_or(1),
            i_delta,
            i_gamma,
            mode,
        })
    }
}

/// `δ(f)` with per-branch values and `γ(f)`, both level-zero values checked by elimination and formula.
pub fn delta(f: &MultiGerm, cap: u32) -> Result<GermInvariants> {
    let mut alg = GermAlgebra::new(f, cap)?;
    GermInvariants::from_algebra(f, &mut alg, 0, InvariantMode::BothAgree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HigherInvariants {
    pub i: usize,
    pub delta: usize,
    pub gamma: usize,
    pub mode: InvariantMode,
}

pub fn higher_invariants(f: &MultiGerm, i: usize, mode: InvariantMode, cap: u32) -> Result<HigherInvariants> {
    let mut alg = GermAlgebra::new(f, cap)?;
    let (delta, gamma) = alg.level_invariants(i, mode)?;
    Ok(HigherInvariants { i, delta, gamma, mode })
}
