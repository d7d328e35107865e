use crate::algebra::{JetTruncation, Polynomial, Rational};
use crate::error::{Error, Result};

/// An element of the free module `K[x]^rank`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FreeModuleElement {
    comps: Vec<Polynomial>,
}

impl FreeModuleElement {
    pub fn new(comps: Vec<Polynomial>) -> Result<Self> {
        let first = comps.first().ok_or_else(|| Error::Arity("rank must be positive".into()))?;
        let n = first.nvars();
        if let Some(c) = comps.iter().find(|c| c.nvars() != n) {
            return Err(Error::VariableCount(n, c.nvars()));
        }
        Ok(FreeModuleElement { comps })
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        FreeModuleElement { comps: vec![Polynomial::zero(nvars); rank] }
    }

    /// `c · e_i`.
    pub fn basis(rank: usize, i: usize, c: Polynomial) -> Self {
        let mut v = Self::zero(rank, c.nvars());
        v.comps[i] = c;
        v
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn nvars(&self) -> usize {
        self.comps[0].nvars()
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Polynomial {
        &self.comps[i]
    }

    pub fn into_comps(self) -> Vec<Polynomial> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    /// Lowest degree over all components.
    pub fn order(&self) -> Option<u32> {
        self.comps.iter().filter_map(Polynomial::order).min()
    }

    pub fn degree(&self) -> Option<u32> {
        self.comps.iter().filter_map(Polynomial::degree).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank(), "rank mismatch");
        FreeModuleElement { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank(), "rank mismatch");
        FreeModuleElement { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FreeModuleElement { comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul_poly(&self, g: &Polynomial) -> Self {
        FreeModuleElement { comps: self.comps.iter().map(|a| a * g).collect() }
    }

    pub fn truncate(&self, t: JetTruncation) -> Self {
        FreeModuleElement { comps: self.comps.iter().map(|a| t.apply(a)).collect() }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        FreeModuleElement { comps: self.comps.iter().map(|a| a.homogeneous_part(d)).collect() }
    }
}
