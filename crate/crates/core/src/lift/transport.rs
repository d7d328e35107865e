//! Moving liftable fields along a target diffeomorphism: `η ↦ dH·(η∘H⁻¹)`.

use num_traits::Zero;

use crate::algebra::{JetTruncation, Polynomial};
use crate::error::{Error, Result};
use crate::germs::{Branch, MultiGerm, VectorFieldGerm};
use crate::lift::module::{LiftModule, Provenance};
use crate::polymodule::sparse::{rank_of, RatRow};

/// A target diffeomorphism germ with a claimed inverse.
///
/// Invariants: both maps fix the origin, `dH(0)` is invertible, and both compositions agree
/// with the identity modulo `m^cert`. `exact` records whether they agree identically.
#[derive(Clone, Debug)]
pub struct DiffeoPair {
    forward: Vec<Polynomial>,
    inverse: Vec<Polynomial>,
    cert: u32,
    exact: bool,
}

fn compose(outer: &[Polynomial], inner: &[Polynomial], trunc: Option<JetTruncation>) -> Result<Vec<Polynomial>> {
    outer.iter().map(|c| c.substitute(inner, trunc)).collect()
}

impl DiffeoPair {
    pub fn new(forward: Vec<Polynomial>, inverse: Vec<Polynomial>, cert: u32) -> Result<Self> {
        let p = forward.len();
        if inverse.len() != p || forward.iter().chain(&inverse).any(|c| c.nvars() != p) {
            return Err(Error::Arity(format!("diffeomorphism and inverse must be maps K^{p} -> K^{p}")));
        }
        if forward.iter().chain(&inverse).any(|c| !c.constant_term().is_zero()) {
            return Err(Error::Semantic("diffeomorphism must fix the origin".into()));
        }
        let jac0: Vec<RatRow> = forward
            .iter()
            .map(|c| (0..p).map(|r| (r, c.partial_derivative(r).constant_term())).filter(|(_, q)| !q.is_zero()).collect())
            .collect();
        if rank_of(p, &jac0) != p {
            return Err(Error::Semantic("diffeomorphism has a singular linear part".into()));
        }
        let id: Vec<Polynomial> = (0..p).map(|q| Polynomial::var(p, q)).collect();
        let t = JetTruncation::new(cert);
        for (a, b, what) in [(&forward, &inverse, "H∘H⁻¹"), (&inverse, &forward, "H⁻¹∘H")] {
            if compose(a, b, Some(t))? != id.iter().map(|z| t.apply(z)).collect::<Vec<_>>() {
                return Err(Error::Semantic(format!("{what} differs from the identity below order {cert}")));
            }
        }
        let exact = compose(&forward, &inverse, None)? == id && compose(&inverse, &forward, None)? == id;
        Ok(DiffeoPair { forward, inverse, cert, exact })
    }

    pub fn p(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Polynomial] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Polynomial] {
        &self.inverse
    }

    pub fn cert(&self) -> u32 {
        self.cert
    }

    pub fn exact(&self) -> bool {
        self.exact
    }

    fn trunc(&self) -> Option<JetTruncation> {
        (!self.exact).then(|| JetTruncation::new(self.cert))
    }

    /// `(dH·η)∘H⁻¹`; truncated at `cert` when the pair is not exact.
    pub fn transport_field(&self, eta: &VectorFieldGerm) -> Result<VectorFieldGerm> {
        let p = self.p();
        if eta.p() != p {
            return Err(Error::Arity(format!("field has {} components, diffeomorphism has {p}", eta.p())));
        }
        let t = self.trunc();
        let pulled = compose(eta.comps(), &self.inverse, t)?;
        let comps = self
            .forward
            .iter()
            .map(|h| {
                let mut acc = Polynomial::zero(p);
                for (r, e) in pulled.iter().enumerate() {
                    let d = h.partial_derivative(r).substitute(&self.inverse, t)?;
                    acc = &acc + &d.mul_truncated(e, t.map(|t| t.order));
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        VectorFieldGerm::new(comps)
    }

    /// `H∘f`, whose liftable fields are the transports of those of `f`.
    pub fn push_forward(&self, f: &MultiGerm) -> Result<MultiGerm> {
        if f.p() != self.p() {
            return Err(Error::Arity(format!("germ has p = {}, diffeomorphism has {}", f.p(), self.p())));
        }
        let branches = f
            .branches()
            .iter()
            .map(|b| Branch::new(b.label(), b.source_vars().to_vec(), compose(&self.forward, b.components(), self.trunc())?))
            .collect::<Result<Vec<_>>>()?;
        MultiGerm::new(f.target_vars().to_vec(), branches)
    }
}

/// Transports every generator and re-certifies the result over `target` (default `H∘f`).
pub fn transport(module: &LiftModule, f: &MultiGerm, pair: &DiffeoPair, target: Option<&MultiGerm>) -> Result<(MultiGerm, LiftModule)> {
    let g = match target {
        Some(g) => g.clone(),
        None => pair.push_forward(f)?,
    };
    let gens = module.generators.iter().map(|e| pair.transport_field(e)).collect::<Result<Vec<_>>>()?;
    let mut out = LiftModule::certify(&g, gens, module.certification_order, Provenance::Transport)?;
    out.count_expected = module.count_expected;
    out.warnings = module.warnings.clone();
    if !pair.exact() {
        out.warnings.push(format!("diffeomorphism inverse is only known below order {}", pair.cert()));
    }
    Ok((g, out))
}
