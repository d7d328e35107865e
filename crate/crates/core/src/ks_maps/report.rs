use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::binomial;
use crate::error::{Error, Result};
use crate::germs::{GermAlgebra, InvariantMode, MultiGerm};
use crate::ks_maps::{KSLevel, KSMapModel};

/// A level index that may be infinite in either direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelBound {
    NegInfinity,
    Finite(usize),
    /// Not reached while scanning levels `0..=cap`.
    BeyondCap(usize),
}

impl LevelBound {
    pub fn finite(self) -> Option<usize> {
        match self {
            LevelBound::Finite(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for LevelBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelBound::NegInfinity => write!(f, "-inf"),
            LevelBound::Finite(i) => write!(f, "{i}"),
            LevelBound::BeyondCap(c) => write!(f, "inf (up to cap {c})"),
        }
    }
}

impl Serialize for LevelBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KsOptions {
    /// Highest level scanned.
    pub max_i: usize,
    /// Jet-order cap for detecting finite multiplicity.
    pub multiplicity_cap: u32,
    /// Levels scanned past the point where both bounds are decided, to witness monotonicity.
    pub extra_levels: usize,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions { max_i: 6, multiplicity_cap: 32, extra_levels: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KSReport {
    pub levels: Vec<KSLevel>,
    pub i1: LevelBound,
    pub i2: LevelBound,
}

impl KSReport {
    /// The common value when `i1 = i2` is finite.
    pub fn balanced_level(&self) -> Option<usize> {
        match (self.i1, self.i2) {
            (LevelBound::Finite(a), LevelBound::Finite(b)) if a == b => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCount {
    pub count: usize,
    /// The level `i = i1 = i2`; the count is `dim ker` at level `i + 1`.
    pub level: usize,
    pub formula: i64,
    pub bruteforce: usize,
    /// Always `BothAgree`: the count is returned only when both computations match.
    pub mode: InvariantMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Stability {
    pub stable: bool,
    pub isolated: bool,
}

/// Caches the local algebras and level models of one germ.
#[derive(Clone, Debug)]
pub struct KsAnalyzer {
    germ: MultiGerm,
    alg: GermAlgebra,
    models: BTreeMap<usize, KSMapModel>,
    opts: KsOptions,
}

impl KsAnalyzer {
    pub fn new(germ: &MultiGerm, opts: KsOptions) -> Result<Self> {
        let alg = GermAlgebra::new(germ, opts.multiplicity_cap)?;
        Ok(KsAnalyzer { germ: germ.clone(), alg, models: BTreeMap::new(), opts })
    }

    pub fn germ(&self) -> &MultiGerm {
        &self.germ
    }

    pub fn options(&self) -> KsOptions {
        self.opts
    }

    pub fn algebra(&self) -> &GermAlgebra {
        &self.alg
    }

    pub fn algebra_mut(&mut self) -> &mut GermAlgebra {
        &mut self.alg
    }

    pub fn model(&mut self, j: usize) -> Result<&KSMapModel> {
        if !self.models.contains_key(&j) {
            let m = KSMapModel::build(&mut self.alg, &self.germ, j)?;
            self.models.insert(j, m);
        }
        Ok(&self.models[&j])
    }

    /// Model and algebra together, for callers that embed vectors into the model.
    pub fn model_and_algebra(&mut self, j: usize) -> Result<(&KSMapModel, &mut GermAlgebra)> {
        self.model(j)?;
        Ok((&self.models[&j], &mut self.alg))
    }

    /// Scans levels upward; monotonicity violations and `i1 < i2` are internal errors.
    pub fn locate_i1_i2(&mut self) -> Result<KSReport> {
        let mut levels = Vec::new();
        let mut first_surjective: Option<usize> = None;
        let mut first_non_injective: Option<usize> = None;
        for i in 0..=self.opts.max_i {
            let lv = self.model(i)?.summary();
            if first_surjective.is_some() && !lv.surjective {
                return Err(Error::Consistency(format!("level {i} is not surjective although a lower level is")));
            }
            if first_non_injective.is_some() && lv.injective {
                return Err(Error::Consistency(format!("level {i} is injective although a lower level is not")));
            }
            if lv.surjective && first_surjective.is_none() {
                first_surjective = Some(i);
            }
            if !lv.injective && first_non_injective.is_none() {
                first_non_injective = Some(i);
            }
            levels.push(lv);
            if let (Some(s), Some(k)) = (first_surjective, first_non_injective) {
                if i >= s.max(k) + self.opts.extra_levels {
                    break;
                }
            }
        }
        let scanned = levels.len() - 1;
        let i1 = first_surjective.map_or(LevelBound::BeyondCap(scanned), LevelBound::Finite);
        let i2 = match first_non_injective {
            Some(0) => LevelBound::NegInfinity,
            Some(k) => LevelBound::Finite(k - 1),
            None => LevelBound::BeyondCap(scanned),
        };
        if let (LevelBound::Finite(a), LevelBound::Finite(b)) = (i1, i2) {
            if a < b {
                return Err(Error::Consistency(format!("i1 = {a} is below i2 = {b}")));
            }
        }
        Ok(KSReport { levels, i1, i2 })
    }

    /// `p·C(p+i, i+1) − ((p−n)·ᵢ₊₁δ + ᵢ₊₁γ − ᵢγ)`: the kernel dimension at level `i+1`
    /// whenever that level is surjective.
    pub fn kernel_formula(&mut self, i: usize, mode: InvariantMode) -> Result<i64> {
        let (p, n) = (self.germ.p() as i64, self.germ.n() as i64);
        let (d1, g1) = self.alg.level_invariants(i + 1, mode)?;
        let (_, g0) = self.alg.level_invariants(i, mode)?;
        let domain = p * binomial((p as usize + i) as u64, (i + 1) as u64) as i64;
        Ok(domain - ((p - n) * d1 as i64 + g1 as i64 - g0 as i64))
    }

    /// Minimal number of generators of the liftable module, computed twice.
    ///
    /// `perturb_formula` shifts the formula value and exists only to exercise the mismatch path.
    pub fn min_generators(&mut self, mode: InvariantMode, perturb_formula: i64) -> Result<GeneratorCount> {
        let report = self.locate_i1_i2()?;
        let i = report.balanced_level().ok_or_else(|| {
            Error::Hypothesis(format!(
                "generator count needs i1 = i2 finite, found i1 = {}, i2 = {}",
                report.i1, report.i2
            ))
        })?;
        let bruteforce = self.model(i + 1)?.kernel_dim();
        let formula = self.kernel_formula(i, mode)? + perturb_formula;
        if formula != bruteforce as i64 {
            return Err(Error::Consistency(format!(
                "kernel dimension at level {}: formula gives {formula}, elimination gives {bruteforce}",
                i + 1
            )));
        }
        Ok(GeneratorCount { count: bruteforce, level: i, formula, bruteforce, mode: InvariantMode::BothAgree })
    }

    /// Stable iff level 0 is surjective; isolated iff, in addition, level 0 is injective.
    pub fn classify_stable(&mut self) -> Result<Stability> {
        let m = self.model(0)?;
        let stable = m.is_surjective();
        Ok(Stability { stable, isolated: stable && m.is_injective() })
    }
}

pub fn locate_i1_i2(f: &MultiGerm, opts: KsOptions) -> Result<KSReport> {
    KsAnalyzer::new(f, opts)?.locate_i1_i2()
}

pub fn min_generators(f: &MultiGerm, opts: KsOptions) -> Result<GeneratorCount> {
    KsAnalyzer::new(f, opts)?.min_generators(InvariantMode::BothAgree, 0)
}

pub fn classify_stable(f: &MultiGerm, opts: KsOptions) -> Result<Stability> {
    KsAnalyzer::new(f, opts)?.classify_stable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn embedding_bounds() {
        let e = MultiGerm::from_components(vec![vec![v(1, 0), Polynomial::zero(1)]]).unwrap();
        let r = locate_i1_i2(&e, KsOptions::default()).unwrap();
        assert_eq!((r.i1, r.i2), (LevelBound::Finite(0), LevelBound::NegInfinity));
        let err = min_generators(&e, KsOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn crossing_lines_count() {
        let x = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![x.clone(), Polynomial::zero(1)], vec![Polynomial::zero(1), x]]).unwrap();
        let g = min_generators(&f, KsOptions::default()).unwrap();
        assert_eq!((g.level, g.count), (0, 2));
    }

    #[test]
    fn cusp_pair_count() {
        let x = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![x.pow(2), x.pow(3)], vec![x.pow(3), x.pow(2)]]).unwrap();
        let g = min_generators(&f, KsOptions::default()).unwrap();
        assert_eq!((g.level, g.count), (1, 2));
    }

    #[test]
    fn perturbed_formula_is_caught() {
        let x = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![x.clone(), Polynomial::zero(1)], vec![Polynomial::zero(1), x]]).unwrap();
        let mut a = KsAnalyzer::new(&f, KsOptions::default()).unwrap();
        assert!(matches!(a.min_generators(InvariantMode::BothAgree, 1), Err(Error::Consistency(_))));
    }

    #[test]
    fn fold_is_stable_not_isolated() {
        let f = MultiGerm::from_components(vec![vec![v(2, 0), v(2, 1).pow(2)]]).unwrap();
        assert_eq!(classify_stable(&f, KsOptions::default()).unwrap(), Stability { stable: true, isolated: false });
    }
}
