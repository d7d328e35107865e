//! Submodules of `θ₀(p)` compared modulo `m₀^cert θ₀(p)`.

use serde::Serialize;

use crate::algebra::{format_rational, Rational};
use crate::error::{Error, Result};
use crate::germs::{MonomialIndex, MultiGerm, VectorFieldGerm};
use crate::lift::{solve_lift, LiftCertificate, LiftOutcome};
use crate::polymodule::sparse::{Echelon, RatRow};

/// The image of `Σ C₀·g` in `θ₀(p) / m₀^cert θ₀(p)`.
#[derive(Clone, Debug)]
pub struct ModuleJet {
    p: usize,
    cert: u32,
    index: MonomialIndex,
    ech: Echelon,
}

impl ModuleJet {
    pub fn new(p: usize, cert: u32) -> Self {
        let mut index = MonomialIndex::new(p);
        index.ensure(cert);
        let dim = index.count_below(cert) * p;
        ModuleJet { p, cert, index, ech: Echelon::new(dim) }
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn cert(&self) -> u32 {
        self.cert
    }

    fn row(&self, g: &VectorFieldGerm, shift: usize) -> RatRow {
        let alpha = self.index.mono(shift);
        let mut row: RatRow = Vec::new();
        for (q, c) in g.comps().iter().enumerate() {
            for (m, x) in c.terms() {
                if m.degree() + alpha.degree() < self.cert {
                    row.push((self.index.get(&m.mul(alpha)).expect("below cert") * self.p + q, x.clone()));
                }
            }
        }
        row.sort_by_key(|(c, _)| *c);
        row
    }

    /// Adds every multiple `X^α g` with `|α| >= min_shift_degree`.
    pub fn add_multiples(&mut self, g: &VectorFieldGerm, min_shift_degree: u32) {
        let lo = self.index.count_below(min_shift_degree.min(self.cert));
        for a in lo..self.index.count_below(self.cert) {
            let r = self.row(g, a);
            if !r.is_empty() {
                self.ech.insert_rat(&r);
            }
        }
    }

    pub fn add_generator(&mut self, g: &VectorFieldGerm) {
        self.add_multiples(g, 0);
    }

    pub fn contains(&self, g: &VectorFieldGerm) -> bool {
        self.ech.contains_rat(&self.row(g, 0))
    }

    pub fn from_generators(p: usize, cert: u32, gens: &[VectorFieldGerm]) -> Self {
        let mut m = ModuleJet::new(p, cert);
        for g in gens {
            m.add_generator(g);
        }
        m
    }
}

/// `dim M / (m₀M + m₀^cert θ)` for the module generated by `gens`.
pub fn nakayama_count(p: usize, cert: u32, gens: &[VectorFieldGerm]) -> usize {
    let full = ModuleJet::from_generators(p, cert, gens);
    let mut shifted = ModuleJet::new(p, cert);
    for g in gens {
        shifted.add_multiples(g, 1);
    }
    full.dim() - shifted.dim()
}

/// Greedy Nakayama selection in input order: `g` is kept unless it lies in `m₀M` plus the kept ones.
pub fn minimize(p: usize, cert: u32, gens: &[VectorFieldGerm]) -> Vec<usize> {
    let mut acc = ModuleJet::new(p, cert);
    for g in gens {
        acc.add_multiples(g, 1);
    }
    let mut kept = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        if g.is_zero() || acc.contains(g) {
            continue;
        }
        acc.add_multiples(g, 0);
        kept.push(k);
    }
    kept
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionFailure {
    /// Index into the sequence that was tested for membership.
    pub index: usize,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleComparison {
    pub cert: u32,
    /// First element of the reference not in the span of the candidate set.
    pub reference_not_in_candidate: Option<InclusionFailure>,
    /// First element of the candidate set not in the span of the reference.
    pub candidate_not_in_reference: Option<InclusionFailure>,
}

impl ModuleComparison {
    pub fn equal(&self) -> bool {
        self.reference_not_in_candidate.is_none() && self.candidate_not_in_reference.is_none()
    }
}

fn first_missing(p: usize, cert: u32, span: &[VectorFieldGerm], test: &[VectorFieldGerm], names: &[String]) -> Option<InclusionFailure> {
    let m = ModuleJet::from_generators(p, cert, span);
    test.iter()
        .position(|g| !m.contains(g))
        .map(|index| InclusionFailure { index, witness: test[index].render_pretty(names) })
}

/// Double inclusion of generated modules modulo `m₀^cert θ₀(p)`.
pub fn compare_modules(candidate: &[VectorFieldGerm], reference: &[VectorFieldGerm], cert: u32, names: &[String]) -> Result<ModuleComparison> {
    let p = candidate.first().or(reference.first()).map(VectorFieldGerm::p).ok_or_else(|| Error::Arity("no fields to compare".into()))?;
    if candidate.iter().chain(reference).any(|g| g.p() != p) {
        return Err(Error::Arity("fields of different arity".into()));
    }
    Ok(ModuleComparison {
        cert,
        reference_not_in_candidate: first_missing(p, cert, candidate, reference, names),
        candidate_not_in_reference: first_missing(p, cert, reference, candidate, names),
    })
}

/// Where a generating set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Kernel basis of the first surjective level, completed by a bounded-degree ansatz.
    KernelAnsatz,
    /// Kernel basis completed level by level through preimages.
    KernelCorrection,
    /// Restriction of a one-parameter stable unfolding.
    Unfolding,
    /// Image under a target diffeomorphism.
    Transport,
    /// Fields tangent to the image curve, each shown to lift.
    Image,
    /// Supplied by the user and verified.
    Supplied,
}

/// A generating set of liftable fields, each with its lift certificate.
#[derive(Clone, Debug)]
pub struct LiftModule {
    pub generators: Vec<VectorFieldGerm>,
    pub certificates: Vec<LiftCertificate>,
    pub certification_order: u32,
    pub count_expected: Option<usize>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl LiftModule {
    /// Certifies every field with `solve_lift`; any obstruction is an error.
    pub fn certify(f: &MultiGerm, generators: Vec<VectorFieldGerm>, cert: u32, provenance: Provenance) -> Result<Self> {
        let mut certificates = Vec::new();
        for g in &generators {
            certificates.push(solve_lift(f, g, cert)?.into_result()?);
        }
        Ok(LiftModule { generators, certificates, certification_order: cert, count_expected: None, provenance, warnings: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn exact(&self) -> bool {
        self.certificates.iter().all(LiftCertificate::exact)
    }

    /// Target jet order below which module comparisons are meaningful.
    ///
    /// A truncated certificate only constrains `η∘f` below the source order, and target terms of
    /// degree `k` reach source degree `k·o` where `o` is the least order of a branch component.
    pub fn reliable_target_order(&self, f: &MultiGerm) -> u32 {
        if self.exact() {
            return self.certification_order;
        }
        let o = f
            .branches()
            .iter()
            .flat_map(|b| b.components().iter().filter_map(crate::algebra::Polynomial::order))
            .min()
            .unwrap_or(1)
            .max(1);
        self.certification_order.div_ceil(o)
    }

    /// Independent re-verification: recomputes each residual and re-solves from scratch.
    pub fn reverify(&self, f: &MultiGerm) -> Result<Vec<bool>> {
        self.generators
            .iter()
            .zip(&self.certificates)
            .map(|(g, c)| Ok(c.recheck(f)? && matches!(solve_lift(f, g, self.certification_order)?, LiftOutcome::Lifted(_))))
            .collect()
    }

    pub fn summary(&self, names: &[String]) -> LiftModuleSummary {
        LiftModuleSummary {
            generators: self
                .generators
                .iter()
                .zip(&self.certificates)
                .map(|(g, c)| GeneratorSummary {
                    field: g.render_pretty(names),
                    tuple: g.render_tuple(names),
                    exact: c.exact(),
                    residual_order: c.branches.iter().filter_map(|b| b.residual_order).min(),
                })
                .collect(),
            certification_order: self.certification_order,
            count_expected: self.count_expected,
            provenance: self.provenance,
            warnings: self.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSummary {
    pub field: String,
    pub tuple: String,
    pub exact: bool,
    /// Lowest degree of a nonzero residual on some branch; absent when all residuals vanish.
    pub residual_order: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftModuleSummary {
    pub generators: Vec<GeneratorSummary>,
    pub certification_order: u32,
    pub count_expected: Option<usize>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub cert: u32,
    /// Per candidate field: liftable, or the rendered obstruction.
    pub liftable: Vec<std::result::Result<bool, String>>,
    pub comparison: Option<ModuleComparison>,
    pub nakayama_count: usize,
    pub expected_count: Option<usize>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.liftable.iter().all(|r| matches!(r, Ok(true)))
            && self.comparison.as_ref().map_or(true, ModuleComparison::equal)
            && self.expected_count.map_or(true, |c| c == self.nakayama_count)
    }
}

/// Liftability of every field, module equality against `reference` when given, and the Nakayama count.
pub fn verify_generating_set(
    f: &MultiGerm,
    fields: &[VectorFieldGerm],
    reference: Option<&[VectorFieldGerm]>,
    expected_count: Option<usize>,
    cert: u32,
) -> Result<VerifyReport> {
    let names = f.target_vars().to_vec();
    let mut liftable = Vec::new();
    for g in fields {
        liftable.push(match solve_lift(f, g, cert)? {
            LiftOutcome::Lifted(_) => Ok(true),
            LiftOutcome::Obstructed(o) => Err(format!(
                "obstructed at degree {} on branch {}: {}",
                o.degree,
                o.branch,
                o.render(f.branches()[0].source_vars(), &names)
            )),
        });
    }
    let comparison = match reference {
        Some(r) => Some(compare_modules(fields, r, cert, &names)?),
        None => None,
    };
    Ok(VerifyReport { cert, liftable, comparison, nakayama_count: nakayama_count(f.p(), cert, fields), expected_count })
}

/// Coefficients as strings, for reports.
pub fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{default_names, Polynomial};

    fn field(comps: Vec<Polynomial>) -> VectorFieldGerm {
        VectorFieldGerm::new(comps).unwrap()
    }

    #[test]
    fn strict_submodule_is_detected() {
        let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let xdx = field(vec![x.clone(), Polynomial::zero(2)]);
        let ydy = field(vec![Polynomial::zero(2), y.clone()]);
        let cmp = compare_modules(std::slice::from_ref(&xdx), &[xdx.clone(), ydy], 8, &default_names("X", 2)).unwrap();
        assert!(!cmp.equal());
        let miss = cmp.reference_not_in_candidate.unwrap();
        assert_eq!(miss.index, 1);
        assert!(cmp.candidate_not_in_reference.is_none());
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let a = field(vec![x.clone(), Polynomial::zero(2)]);
        let b = field(vec![Polynomial::zero(2), y.clone()]);
        let c = a.mul_poly(&y).add(&b.mul_poly(&x));
        let d = a.add(&b);
        let gens = vec![a, c, b, d];
        assert_eq!(nakayama_count(2, 8, &gens), 2);
        assert_eq!(minimize(2, 8, &gens), vec![0, 2]);
    }
}
