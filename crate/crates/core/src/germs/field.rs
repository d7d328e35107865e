use num_traits::Zero;

use crate::algebra::{JetTruncation, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::Branch;
use crate::polymodule::FreeModuleElement;

/// A target vector field `Σ η_q ∂/∂X_q` with polynomial coefficients in the `p` target variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorFieldGerm {
    comps: Vec<Polynomial>,
}

impl VectorFieldGerm {
    /// Requires `p` components, each in `p` variables.
    pub fn new(comps: Vec<Polynomial>) -> Result<Self> {
        let p = comps.len();
        if p == 0 {
            return Err(Error::Arity("a vector field needs at least one component".into()));
        }
        if let Some(c) = comps.iter().find(|c| c.nvars() != p) {
            return Err(Error::VariableCount(p, c.nvars()));
        }
        Ok(VectorFieldGerm { comps })
    }

    pub fn zero(p: usize) -> Self {
        VectorFieldGerm { comps: vec![Polynomial::zero(p); p] }
    }

    /// `c · ∂/∂X_q`.
    pub fn basis(p: usize, q: usize, c: Polynomial) -> Self {
        let mut v = Self::zero(p);
        v.comps[q] = c;
        v
    }

    pub fn p(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn comp(&self, q: usize) -> &Polynomial {
        &self.comps[q]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    pub fn order(&self) -> Option<u32> {
        self.comps.iter().filter_map(Polynomial::order).min()
    }

    pub fn degree(&self) -> Option<u32> {
        self.comps.iter().filter_map(Polynomial::degree).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorFieldGerm { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        VectorFieldGerm { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VectorFieldGerm { comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul_poly(&self, g: &Polynomial) -> Self {
        VectorFieldGerm { comps: self.comps.iter().map(|a| a * g).collect() }
    }

    pub fn truncate(&self, t: JetTruncation) -> Self {
        VectorFieldGerm { comps: self.comps.iter().map(|a| t.apply(a)).collect() }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        VectorFieldGerm { comps: self.comps.iter().map(|a| a.homogeneous_part(d)).collect() }
    }

    pub fn value_at_zero(&self) -> Vec<Rational> {
        self.comps.iter().map(Polynomial::constant_term).collect()
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.value_at_zero().iter().all(Zero::is_zero)
    }

    /// `η ∘ f_b`, optionally truncated.
    pub fn compose(&self, branch: &Branch, trunc: Option<JetTruncation>) -> Result<Vec<Polynomial>> {
        self.comps.iter().map(|c| c.substitute(branch.components(), trunc)).collect()
    }

    pub fn to_module_element(&self) -> FreeModuleElement {
        FreeModuleElement::new(self.comps.clone()).expect("positive rank")
    }

    pub fn from_module_element(v: FreeModuleElement) -> Result<Self> {
        Self::new(v.into_comps())
    }

    /// Tuple form `(η_1, ..., η_p)`, the form accepted by the document parser.
    pub fn render_tuple(&self, names: &[String]) -> String {
        let parts: Vec<String> = self.comps.iter().map(|c| c.render(names)).collect();
        format!("({})", parts.join(", "))
    }

    /// `(η_1)∂X_1 + ...`, omitting zero components.
    pub fn render_pretty(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| if c.len() == 1 { format!("{}∂{}", c.render(names), n) } else { format!("({})∂{}", c.render(names), n) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::default_names;

    #[test]
    fn renders_both_forms() {
        let x = Polynomial::var(2, 0);
        let v = VectorFieldGerm::basis(2, 1, x.scale(&crate::algebra::int(2)));
        let names = default_names("X", 2);
        assert_eq!(v.render_tuple(&names), "(0, 2*X1)");
        assert_eq!(v.render_pretty(&names), "2*X1∂X2");
    }

    #[test]
    fn arity_is_checked() {
        assert!(VectorFieldGerm::new(vec![Polynomial::var(1, 0), Polynomial::var(1, 0)]).is_err());
    }
}
