//! Liftable fields of a germ from those of a stable one-parameter unfolding.
//!
//! With `g(X, Λ) = (X, Λ²)`, a field is in `Lift(F) ∩ Lift(g)` exactly when it is a combination
//! of generators of `Lift(F)` whose `∂Λ` component is divisible by `Λ`. Those combinations are
//! read off the syzygies of `(η¹_Λ, ..., ηᵐ_Λ, Λ)`. Setting `Λ = 0` and dropping the `∂Λ`
//! component gives candidates for `Lift(f)`, which are then minimised and certified.

use crate::algebra::Polynomial;
use crate::error::{Error, ErrorKind, Result};
use crate::germs::{InvariantMode, UnfoldingSpec, VectorFieldGerm};
use crate::ks_maps::KsAnalyzer;
use crate::lift::complete::{complete_generators, count_order, CompletionConfig};
use crate::lift::module::{minimize, nakayama_count, LiftModule, Provenance};
use crate::polymodule::syzygy_basis;

/// Generators of the liftable fields of `(X, Λ) ↦ (X, Λ²)`: `∂X_j` off the parameters, `Λ∂Λ` on them.
pub fn lift_of_squaring_map(total_dim: usize, param_indices: &[usize]) -> Vec<VectorFieldGerm> {
    (0..total_dim)
        .map(|j| {
            let c = if param_indices.contains(&j) { Polynomial::var(total_dim, j) } else { Polynomial::one(total_dim) };
            VectorFieldGerm::basis(total_dim, j, c)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub module: LiftModule,
    pub unfolding_lift: LiftModule,
    /// Generators of `Lift(F) ∩ Lift(g)` before restriction.
    pub intersection: Vec<VectorFieldGerm>,
}

/// `Lift(f)` from `spec`. `unfolding_lift` overrides the completion of `Lift(F)`.
pub fn restrict_from_unfolding(spec: &UnfoldingSpec, unfolding_lift: Option<LiftModule>, config: CompletionConfig) -> Result<Restriction> {
    if !spec.stable {
        return Err(Error::Hypothesis("the unfolding is not stable".into()));
    }
    let big = &spec.unfolding;
    let lift_f = match unfolding_lift {
        Some(m) => {
            if m.generators.iter().any(|g| g.p() != big.p()) {
                return Err(Error::Arity(format!("supplied generators must have {} components", big.p())));
            }
            LiftModule::certify(big, m.generators, m.certification_order, Provenance::Supplied)?
        }
        None => complete_generators(big, config)?.module,
    };
    let t = spec.parameter_index;
    let pp = big.p();
    let mut column: Vec<Polynomial> = lift_f.generators.iter().map(|g| g.comp(t).clone()).collect();
    column.push(Polynomial::var(pp, t));
    let syz = syzygy_basis(&column)?;
    let m = lift_f.generators.len();
    let intersection: Vec<VectorFieldGerm> = syz
        .iter()
        .map(|s| {
            s[..m]
                .iter()
                .zip(&lift_f.generators)
                .fold(VectorFieldGerm::zero(pp), |acc, (a, g)| acc.add(&g.mul_poly(a)))
        })
        .filter(|z| !z.is_zero())
        .collect();
    let candidates: Vec<VectorFieldGerm> = intersection
        .iter()
        .map(|z| VectorFieldGerm::new((0..pp).filter(|&q| q != t).map(|q| z.comp(q).eliminate_var_at_zero(t)).collect()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|z| !z.is_zero())
        .collect();
    let f = &spec.base;
    let cert = config.cert.unwrap_or(lift_f.certification_order);
    let order = count_order(&candidates, cert);
    let keep = minimize(f.p(), order, &candidates);
    let gens: Vec<VectorFieldGerm> = keep.into_iter().map(|i| candidates[i].clone()).collect();
    let mut module = LiftModule::certify(f, gens, cert, Provenance::Unfolding)?;
    module.warnings = lift_f.warnings.clone();
    if nakayama_count(f.p(), order, &module.generators) != module.len() {
        return Err(Error::Consistency("minimised restriction is not minimal".into()));
    }
    match KsAnalyzer::new(f, config.ks).and_then(|mut a| a.min_generators(InvariantMode::BothAgree, 0)) {
        Ok(c) if c.count != module.len() => {
            return Err(Error::Consistency(format!("restriction gives {} generators, kernel count is {}", module.len(), c.count)));
        }
        Ok(c) => module.count_expected = Some(c.count),
        Err(e) if e.kind() == ErrorKind::Hypothesis => {
            module.warnings.push(format!("no independent generator count: {e}"));
        }
        Err(e) => return Err(e),
    }
    Ok(Restriction { module, unfolding_lift: lift_f, intersection })
}
