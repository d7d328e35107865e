//! Picks a construction for a document and runs it.
//!
//! Order of preference: quadratic-suspension removal when `n > p`, the declared unfolding,
//! the kernel completion when `i1 = i2`, the image equation for plane curves, an automatically
//! found unfolding, and finally certification of the document's own reference fields.

use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::germs::{build_unfolding, reduce_to_core, GermAlgebra, MultiGerm, ReductionSummary, UnfoldingMode};
use crate::ks_maps::{stable_order, KSReport, KsAnalyzer, KsOptions};
use crate::lift::{
    compare_modules, complete_generators, count_order, lift_from_image, nakayama_count, restrict_from_unfolding, transport,
    CompletionConfig, LiftModule, ModuleComparison, Provenance,
};
use crate::document::GermDocument;

/// Jet order used for module comparisons against references.
pub const COMPARISON_ORDER: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Completion of the kernel at the balanced level.
    Kernel,
    /// Restriction of the declared one-parameter unfolding.
    DeclaredUnfolding,
    /// Restriction of an unfolding found by search.
    FoundUnfolding,
    /// Fields tangent to the image curve.
    Image,
    /// The document's reference fields, certified.
    References,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunConfig {
    pub cert: Option<u32>,
    pub max_degree: Option<u32>,
    pub ks: KsOptions,
    /// Degree bound for the unfolding search.
    pub unfold_degree: Option<u32>,
}

impl RunConfig {
    /// Applies the document's `options` block underneath explicit settings.
    pub fn with_document(mut self, doc: &GermDocument, explicit_ks: bool) -> Self {
        let o = doc.options;
        self.cert = self.cert.or(o.cert_order);
        self.max_degree = self.max_degree.or(o.max_degree);
        self.unfold_degree = self.unfold_degree.or(o.unfold_degree);
        if !explicit_ks {
            if let Some(m) = o.max_i {
                self.ks.max_i = m as usize;
            }
            if let Some(c) = o.multiplicity_cap {
                self.ks.multiplicity_cap = c;
            }
        }
        self
    }

    fn completion(&self) -> CompletionConfig {
        CompletionConfig { max_degree: self.max_degree, cert: self.cert, strategy: None, ks: self.ks }
    }
}

/// `2·(ℓ·(i+2)+1)` at level `i`, and never below the comparison order.
pub fn default_cert(f: &MultiGerm, level: usize, opts: KsOptions) -> u32 {
    let ell = GermAlgebra::new(f, opts.multiplicity_cap).map(|a| stable_order(&a)).unwrap_or(4);
    (2 * (ell * (level as u32 + 2) + 1)).max(COMPARISON_ORDER)
}

/// Exact certificates hold at every order; truncated ones only below the reliable order.
pub fn comparison_order(module: &LiftModule, f: &MultiGerm) -> u32 {
    if module.exact() {
        COMPARISON_ORDER
    } else {
        module.reliable_target_order(f).min(COMPARISON_ORDER)
    }
}

#[derive(Clone, Debug)]
pub struct TransportRun {
    pub target: MultiGerm,
    pub module: LiftModule,
    pub comparison: Option<ModuleComparison>,
}

#[derive(Clone, Debug)]
pub struct DocumentRun {
    pub route: Route,
    /// The germ whose fields were constructed; differs from the document's germ after a reduction.
    pub constructed_on: MultiGerm,
    pub reduction: Option<ReductionSummary>,
    pub report: Option<KSReport>,
    pub module: LiftModule,
    /// Nakayama count of `module` at its counting order.
    pub count: usize,
    pub comparison: Option<ModuleComparison>,
    pub transport: Option<TransportRun>,
}

fn construct(doc: &GermDocument, f: &MultiGerm, config: RunConfig) -> Result<(Route, Option<KSReport>, LiftModule)> {
    let report = KsAnalyzer::new(f, config.ks).and_then(|mut a| a.locate_i1_i2());
    let report = match report {
        Ok(r) => Some(r),
        Err(e) if e.kind() == ErrorKind::Hypothesis => None,
        Err(e) => return Err(e),
    };
    let fallback_cert = || config.cert.unwrap_or_else(|| default_cert(f, 0, config.ks));
    if let Some(u) = doc.unfolding.as_ref().filter(|_| doc.germ == *f) {
        let spec = build_unfolding(f, u.mode(), config.ks)?;
        let supplied = if u.lift.is_empty() {
            None
        } else {
            Some(LiftModule::certify(&u.germ, u.lift.clone(), fallback_cert(), Provenance::Supplied)?)
        };
        let mut cc = config.completion();
        cc.cert = Some(fallback_cert());
        let r = restrict_from_unfolding(&spec, supplied, cc)?;
        return Ok((Route::DeclaredUnfolding, report, r.module));
    }
    if report.as_ref().and_then(KSReport::balanced_level).is_some() {
        let c = complete_generators(f, config.completion())?;
        return Ok((Route::Kernel, report, c.module));
    }
    let mut last: Option<Error> = None;
    if f.n() == 1 && f.p() == 2 {
        match lift_from_image(f, fallback_cert()) {
            Ok(r) => return Ok((Route::Image, report, r.module)),
            Err(e) if e.kind() == ErrorKind::Hypothesis => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let stable = report.as_ref().and_then(|r| r.levels.first()).is_some_and(|l| l.surjective);
    if !stable && report.is_some() {
        let mode = UnfoldingMode::Auto { max_degree: config.unfold_degree.unwrap_or(2) };
        match build_unfolding(f, mode, config.ks) {
            Ok(spec) => {
                let mut cc = config.completion();
                cc.cert = Some(fallback_cert());
                let r = restrict_from_unfolding(&spec, None, cc)?;
                return Ok((Route::FoundUnfolding, report, r.module));
            }
            Err(e) if matches!(e.kind(), ErrorKind::Hypothesis | ErrorKind::ResourceCap) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    if !doc.references.is_empty() && doc.germ == *f {
        let mut m = LiftModule::certify(f, doc.references.clone(), fallback_cert(), Provenance::Supplied)?;
        m.warnings.push("no construction applies; the reference fields were certified instead".into());
        return Ok((Route::References, report, m));
    }
    Err(last.unwrap_or_else(|| Error::Hypothesis("no construction applies to this germ".into())))
}

/// Constructs and certifies the liftable fields of `doc`, comparing against its references.
pub fn run_document(doc: &GermDocument, config: RunConfig) -> Result<DocumentRun> {
    let f = &doc.germ;
    let (core, reduction) = if f.n() > f.p() {
        let r = reduce_to_core(f)?;
        let s = r.summary();
        (r.core, Some(s))
    } else {
        (f.clone(), None)
    };
    let (route, report, mut module) = construct(doc, &core, config)?;
    if reduction.is_some() {
        let warnings = module.warnings.clone();
        let expected = module.count_expected;
        module = LiftModule::certify(f, module.generators, module.certification_order, module.provenance)?;
        module.warnings = warnings;
        module.count_expected = expected;
    }
    let order = count_order(&module.generators, module.certification_order);
    let count = nakayama_count(f.p(), order, &module.generators);
    let names = f.target_vars();
    let cmp_order = comparison_order(&module, f);
    let comparison = if doc.references.is_empty() {
        None
    } else {
        Some(compare_modules(&module.generators, &doc.references, cmp_order, names)?)
    };
    let transport = match &doc.diffeo {
        Some(d) => {
            let pair = d.pair(module.certification_order)?;
            let (target, moved) = transport(&module, f, &pair, None)?;
            let comparison = if d.references.is_empty() {
                None
            } else {
                let o = comparison_order(&moved, &target);
                Some(compare_modules(&moved.generators, &d.references, o, names)?)
            };
            Some(TransportRun { target, module: moved, comparison })
        }
        None => None,
    };
    Ok(DocumentRun { route, constructed_on: core, reduction, report, module, count, comparison, transport })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::catalog;

    fn run(name: &str) -> DocumentRun {
        run_document(&catalog::load(name).unwrap(), RunConfig::default()).unwrap()
    }

    #[test]
    fn routes_follow_the_preference_order() {
        assert_eq!(run("E0").route, Route::Kernel);
        assert_eq!(run("s66").route, Route::DeclaredUnfolding);
        assert_eq!(run("ex35-c").route, Route::Image);
        assert_eq!(run("fold").route, Route::References);
    }

    #[test]
    fn suspension_is_reduced_then_certified_on_the_original() {
        let r = run("suspended-69");
        assert_eq!(r.reduction.as_ref().unwrap().removed_variables, 2);
        assert_eq!(r.constructed_on.n(), 2);
        assert_eq!(r.module.certificates[0].branches.len(), 2);
        assert_eq!(r.count, 2);
        assert!(r.comparison.unwrap().equal());
    }

    #[test]
    fn transport_is_compared_against_moved_references() {
        let r = run("whitney-psi2");
        assert!(r.transport.unwrap().comparison.unwrap().equal());
    }
}
