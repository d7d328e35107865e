//! One function per subcommand. Each returns a report; failures land in its `error` field.

use std::path::Path;
use std::time::Instant;

use liftable_core::document::run::{comparison_order, default_cert, run_document, DocumentRun, Route, RunConfig};
use liftable_core::document::{catalog as builtin, Expectation, GermDocument};
use liftable_core::germs::{build_unfolding, reduce_to_core, GermInvariants, InvariantMode, MultiGerm, UnfoldingMode};
use liftable_core::ks_maps::{KSReport, KsAnalyzer, KsOptions, LevelBound};
use liftable_core::lift::{
    compare_modules, complete_generators, count_order, lift_from_image, nakayama_count, restrict_from_unfolding,
    verify_generating_set, CompletionConfig, LiftModule, Provenance,
};
use liftable_core::{Error, ErrorKind, Result};
use rayon::prelude::*;

use crate::report::{
    CatalogEntry, CheckSection, CheckedField, ConfigEcho, EntryStatus, ErrorInfo, ExpectationCheck, GermInfo, KernelSection, KsSection,
    LiftSection, ReductionSection, Report, TransportSection,
};
use crate::{resolve, Flags, Input, ModeArg, RouteArg, WORKDIR_ENV};

pub const DEFAULT_MAX_DEGREE: u32 = 12;

/// Levels of `ᵢδ`, `ᵢγ` reported by `analyze`, at most `max_i`.
const INVARIANT_LEVELS: usize = 3;

fn echo(flags: &Flags) -> ConfigEcho {
    ConfigEcho {
        max_i: flags.max_i.unwrap_or(KsOptions::default().max_i),
        max_degree: Some(flags.max_degree.unwrap_or(DEFAULT_MAX_DEGREE)),
        cert_order: flags.cert_order,
        mode: flags.mode.invariant_mode(),
        route: None,
        level: None,
        search_degree: None,
        workdir: std::env::var(WORKDIR_ENV).ok(),
    }
}

fn perturbation(flags: &Flags) -> i64 {
    i64::from(flags.inject_mismatch)
}

/// Runs `body` on a fresh report and records its error, if any.
fn with_report(command: &str, mut config: ConfigEcho, edit: impl FnOnce(&mut ConfigEcho), body: impl FnOnce(&mut Report) -> Result<()>) -> Report {
    edit(&mut config);
    let mut report = Report::new(command, config);
    let start = Instant::now();
    if let Err(e) = body(&mut report) {
        report.error = Some(ErrorInfo::from(&e));
    }
    report.timings.insert("total".into(), start.elapsed().as_secs_f64());
    report
}

fn timed<T>(report: &mut Report, phase: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f();
    *report.timings.entry(phase.to_string()).or_insert(0.0) += t.elapsed().as_secs_f64();
    out
}

fn load(input: &Input) -> Result<GermDocument> {
    match (&input.document, &input.catalog) {
        (_, Some(name)) => builtin::load(name),
        (Some(path), None) => {
            let path = resolve(path);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Semantic(format!("cannot read {}: {e}", path.display())))?;
            GermDocument::parse(&text)
        }
        (None, None) => Err(Error::Semantic("no germ document given".into())),
    }
}

/// Explicit flags, then the document's options, then the defaults.
fn run_config(doc: &GermDocument, flags: &Flags) -> RunConfig {
    let mut c = RunConfig { cert: flags.cert_order, max_degree: flags.max_degree, ..RunConfig::default() }.with_document(doc, flags.max_i.is_some());
    if let Some(m) = flags.max_i {
        c.ks.max_i = m;
    }
    c.max_degree = c.max_degree.or(Some(DEFAULT_MAX_DEGREE));
    c
}

fn completion(c: &RunConfig) -> CompletionConfig {
    CompletionConfig { max_degree: c.max_degree, cert: c.cert, strategy: None, ks: c.ks }
}

fn describe(doc: &GermDocument) -> GermInfo {
    GermInfo::new(&doc.name, doc.title.as_deref(), &doc.germ)
}

/// The germ analyses run on: the document's germ, or its core when it has quadratic suspension variables.
fn analysed_germ(doc: &GermDocument, report: &mut Report) -> Result<MultiGerm> {
    if doc.germ.n() <= doc.germ.p() {
        return Ok(doc.germ.clone());
    }
    let r = timed(report, "reduce", || reduce_to_core(&doc.germ))?;
    let s = r.summary();
    report.reduction = Some(ReductionSection {
        removed_variables: s.removed_variables,
        quadratic: s.quadratic,
        core: GermInfo::new(&format!("{}-core", doc.name), None, &r.core),
    });
    report.warnings.push(format!("analysed the core germ after removing {} quadratic variables", s.removed_variables));
    Ok(r.core)
}

fn bound_expectation(b: LevelBound) -> Expectation {
    match b {
        LevelBound::NegInfinity => Expectation::NegInf,
        LevelBound::Finite(i) => Expectation::Int(i as i64),
        LevelBound::BeyondCap(_) => Expectation::PosInf,
    }
}

fn expect(doc: &GermDocument, key: &str, computed: Expectation) -> Option<ExpectationCheck> {
    doc.expectation(key).map(|e| ExpectationCheck { key: key.into(), expected: e.to_string(), computed: computed.to_string(), ok: *e == computed })
}

fn lift_section(route: Option<Route>, m: &LiftModule, f: &MultiGerm, references: &[liftable_core::germs::VectorFieldGerm]) -> Result<LiftSection> {
    let count = nakayama_count(f.p(), count_order(&m.generators, m.certification_order), &m.generators);
    let comparison = if references.is_empty() {
        None
    } else {
        Some(compare_modules(&m.generators, references, comparison_order(m, f), f.target_vars())?)
    };
    Ok(LiftSection::new(route, m, f.target_vars(), count, m.reverify(f)?, comparison))
}

fn require_reverified(l: &LiftSection) -> Result<()> {
    match l.reverified.iter().position(|ok| !ok) {
        Some(k) => Err(Error::Consistency(format!("generator {} failed independent re-verification", k + 1))),
        None => Ok(()),
    }
}

fn note_comparison(report: &mut Report, l: &LiftSection) {
    if let Some(c) = l.comparison.as_ref().filter(|c| !c.equal()) {
        report.warnings.push(format!("the constructed module differs from the document's references at order {}", c.cert));
    }
}

pub fn analyze(input: &Input, flags: &Flags) -> Report {
    with_report("analyze", echo(flags), |_| {}, |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        let f = analysed_germ(&doc, r)?;
        let config = run_config(&doc, flags);
        let mode = flags.mode.invariant_mode();
        let mut a = timed(r, "algebra", || KsAnalyzer::new(&f, config.ks))?;
        let levels = config.ks.max_i.min(INVARIANT_LEVELS);
        r.invariants = Some(timed(r, "invariants", || GermInvariants::from_algebra(&f, a.algebra_mut(), levels, mode))?);
        let stability = timed(r, "stability", || a.classify_stable())?;
        r.stability = Some(stability);
        let ks = timed(r, "levels", || a.locate_i1_i2())?;
        r.ks = Some(KsSection::from(&ks));
        let mut checks = vec![
            expect(&doc, "stable", Expectation::Bool(stability.stable)),
            expect(&doc, "isolated", Expectation::Bool(stability.isolated)),
            expect(&doc, "i1", bound_expectation(ks.i1)),
            expect(&doc, "i2", bound_expectation(ks.i2)),
        ];
        if ks.balanced_level().is_some() {
            let c = timed(r, "min_generators", || a.min_generators(mode, perturbation(flags)))?;
            checks.push(expect(&doc, "min_gens", Expectation::Int(c.count as i64)));
            r.min_generators = Some(c);
        } else {
            r.warnings.push(format!("no generator count: it needs i1 = i2 finite, found i1 = {}, i2 = {}", ks.i1, ks.i2));
        }
        r.expectations = checks.into_iter().flatten().collect();
        for x in r.expectations.iter().filter(|x| !x.ok) {
            r.warnings.push(format!("expected {} = {}, computed {}", x.key, x.expected, x.computed));
        }
        Ok(())
    })
}

pub fn kernel(input: &Input, level: usize, flags: &Flags) -> Report {
    with_report("kernel", echo(flags), |c| c.level = Some(level), |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        let f = analysed_germ(&doc, r)?;
        let config = run_config(&doc, flags);
        let mut a = KsAnalyzer::new(&f, config.ks)?;
        let (dim, surjective, basis) = timed(r, "elimination", || {
            let m = a.model(level)?;
            Ok((m.kernel_dim(), m.is_surjective(), m.kernel_fields()))
        })?;
        let mode = flags.mode.invariant_mode();
        let formula = if level >= 1 && surjective && flags.mode != ModeArg::Bruteforce {
            Some(timed(r, "formula", || a.kernel_formula(level - 1, mode))? + perturbation(flags))
        } else {
            None
        };
        let names = f.target_vars();
        r.kernel = Some(KernelSection {
            level,
            dim,
            mode: if formula.is_some() { InvariantMode::BothAgree } else { InvariantMode::Bruteforce },
            formula,
            basis: basis.iter().map(|g| g.render_pretty(names)).collect(),
        });
        if let Some(v) = formula.filter(|&v| v != dim as i64) {
            return Err(Error::Consistency(format!("kernel dimension at level {level}: formula gives {v}, elimination gives {dim}")));
        }
        if !surjective {
            r.warnings.push(format!("level {level} is not surjective; the kernel is not a count of generators"));
        }
        Ok(())
    })
}

fn fill_run(r: &mut Report, doc: &GermDocument, run: &DocumentRun) -> Result<LiftSection> {
    if let Some(ks) = &run.report {
        r.ks = Some(KsSection::from(ks));
    }
    if let Some(s) = &run.reduction {
        r.reduction = Some(ReductionSection {
            removed_variables: s.removed_variables,
            quadratic: s.quadratic.clone(),
            core: GermInfo::new(&format!("{}-core", doc.name), None, &run.constructed_on),
        });
    }
    let f = &doc.germ;
    let mut lift = LiftSection::new(Some(run.route), &run.module, f.target_vars(), run.count, timed(r, "reverify", || run.module.reverify(f))?, run.comparison.clone());
    lift.count = run.count;
    r.warnings.extend(run.module.warnings.iter().cloned());
    note_comparison(r, &lift);
    Ok(lift)
}

fn route_name(route: RouteArg) -> String {
    match route {
        RouteArg::Auto => "auto",
        RouteArg::Kernel => "kernel",
        RouteArg::Image => "image",
    }
    .into()
}

pub fn construct(input: &Input, route: RouteArg, flags: &Flags) -> Report {
    with_report("construct", echo(flags), |c| c.route = Some(route_name(route)), |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        let config = run_config(&doc, flags);
        let f = &doc.germ;
        let lift = match route {
            RouteArg::Auto => {
                let run = timed(r, "construct", || run_document(&doc, config))?;
                fill_run(r, &doc, &run)?
            }
            RouteArg::Kernel => {
                if f.n() > f.p() {
                    return Err(Error::Hypothesis("the kernel route needs n <= p; use `reduce` first".into()));
                }
                let c = timed(r, "construct", || complete_generators(f, completion(&config)))?;
                r.warnings.extend(c.module.warnings.iter().cloned());
                timed(r, "reverify", || lift_section(Some(Route::Kernel), &c.module, f, &doc.references))?
            }
            RouteArg::Image => {
                let cert = config.cert.unwrap_or_else(|| default_cert(f, 0, config.ks));
                let m = timed(r, "construct", || lift_from_image(f, cert))?.module;
                timed(r, "reverify", || lift_section(Some(Route::Image), &m, f, &doc.references))?
            }
        };
        r.expectations = expect(&doc, "min_gens", Expectation::Int(lift.count as i64)).into_iter().collect();
        note_comparison(r, &lift);
        let checked = require_reverified(&lift);
        r.lift = Some(lift);
        checked
    })
}

pub fn unfold(input: &Input, search_degree: Option<u32>, flags: &Flags) -> Report {
    with_report("unfold", echo(flags), |c| c.search_degree = search_degree, |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        let f = analysed_germ(&doc, r)?;
        let config = run_config(&doc, flags);
        let cert = config.cert.unwrap_or_else(|| default_cert(&f, 0, config.ks));
        let declared = doc.unfolding.as_ref().filter(|_| doc.germ == f);
        let (route, mode, supplied) = match declared {
            Some(u) => {
                let supplied = if u.lift.is_empty() {
                    None
                } else {
                    Some(timed(r, "certify_supplied", || LiftModule::certify(&u.germ, u.lift.clone(), cert, Provenance::Supplied))?)
                };
                (Route::DeclaredUnfolding, u.mode(), supplied)
            }
            None => {
                let d = search_degree.or(config.unfold_degree).unwrap_or(2);
                (Route::FoundUnfolding, UnfoldingMode::Auto { max_degree: d }, None)
            }
        };
        let spec = timed(r, "unfolding", || build_unfolding(&f, mode, config.ks))?;
        r.unfolding = Some(GermInfo::new(&format!("{}-unfolding", doc.name), None, &spec.unfolding));
        let mut cc = completion(&config);
        cc.cert = Some(cert);
        let m = timed(r, "construct", || restrict_from_unfolding(&spec, supplied, cc))?.module;
        let m = if f == doc.germ { m } else { LiftModule::certify(&doc.germ, m.generators, m.certification_order, m.provenance)? };
        r.warnings.extend(m.warnings.iter().cloned());
        let lift = timed(r, "reverify", || lift_section(Some(route), &m, &doc.germ, &doc.references))?;
        r.expectations = expect(&doc, "min_gens", Expectation::Int(lift.count as i64)).into_iter().collect();
        note_comparison(r, &lift);
        let checked = require_reverified(&lift);
        r.lift = Some(lift);
        checked
    })
}

pub fn check(input: &Input, fields: &Path, flags: &Flags) -> Report {
    with_report("check", echo(flags), |_| {}, |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        let path = resolve(fields);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Semantic(format!("cannot read {}: {e}", path.display())))?;
        let claimed = doc.parse_fields(&text)?;
        let config = run_config(&doc, flags);
        let f = &doc.germ;
        let cert = config.cert.unwrap_or_else(|| default_cert(f, 0, config.ks));
        let refs = (!doc.references.is_empty()).then_some(doc.references.as_slice());
        let expected = doc.expected_int("min_gens").map(|v| v as usize);
        let v = timed(r, "verify", || verify_generating_set(f, &claimed, refs, expected, cert))?;
        let names = f.target_vars();
        let ok = v.ok();
        let failures = v.liftable.iter().filter(|x| !matches!(x, Ok(true))).count();
        r.check = Some(CheckSection {
            cert: v.cert,
            fields: claimed
                .iter()
                .zip(&v.liftable)
                .map(|(g, res)| CheckedField {
                    field: g.render_pretty(names),
                    liftable: matches!(res, Ok(true)),
                    obstruction: res.as_ref().err().cloned(),
                })
                .collect(),
            comparison: v.comparison.clone(),
            nakayama_count: v.nakayama_count,
            count_mode: InvariantMode::Bruteforce,
            expected_count: v.expected_count,
            ok,
        });
        if failures > 0 {
            return Err(Error::Hypothesis(format!("{failures} of {} claimed fields do not lift", claimed.len())));
        }
        if !ok {
            return Err(Error::Hypothesis("the claimed fields lift but do not generate the expected module".into()));
        }
        Ok(())
    })
}

pub fn transport(input: &Input, flags: &Flags) -> Report {
    with_report("transport", echo(flags), |_| {}, |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        if doc.diffeo.is_none() {
            return Err(Error::Semantic(format!("document {} has no diffeo block", doc.name)));
        }
        let config = run_config(&doc, flags);
        let run = timed(r, "construct", || run_document(&doc, config))?;
        let lift = fill_run(r, &doc, &run)?;
        let moved = run.transport.as_ref().ok_or_else(|| Error::Consistency("transport step did not run".into()))?;
        let reverified = timed(r, "reverify", || moved.module.reverify(&moved.target))?;
        let names = moved.target.target_vars();
        let count = nakayama_count(moved.target.p(), count_order(&moved.module.generators, moved.module.certification_order), &moved.module.generators);
        let moved_lift = LiftSection::new(None, &moved.module, names, count, reverified, moved.comparison.clone());
        note_comparison(r, &moved_lift);
        let checked = require_reverified(&lift).and(require_reverified(&moved_lift));
        r.transport = Some(TransportSection { target: GermInfo::new(&format!("{}-transported", doc.name), None, &moved.target), lift: moved_lift });
        r.lift = Some(lift);
        checked
    })
}

pub fn reduce(input: &Input, flags: &Flags) -> Report {
    with_report("reduce", echo(flags), |_| {}, |r| {
        let doc = load(input)?;
        r.germ = Some(describe(&doc));
        if doc.germ.n() <= doc.germ.p() {
            return Err(Error::Hypothesis(format!("nothing to reduce: n = {} is not above p = {}", doc.germ.n(), doc.germ.p())));
        }
        let config = run_config(&doc, flags);
        let run = timed(r, "construct", || run_document(&doc, config))?;
        let lift = fill_run(r, &doc, &run)?;
        let on_core = timed(r, "certify_core", || {
            LiftModule::certify(&run.constructed_on, run.module.generators.clone(), run.module.certification_order, run.module.provenance)
        })?;
        if on_core.len() != lift.generators.len() {
            return Err(Error::Consistency("core and original modules differ in size".into()));
        }
        r.expectations = expect(&doc, "min_gens", Expectation::Int(lift.count as i64)).into_iter().collect();
        let checked = require_reverified(&lift);
        r.lift = Some(lift);
        checked
    })
}

fn run_entry(name: &str, flags: &Flags) -> CatalogEntry {
    let t = Instant::now();
    let doc = match builtin::load(name) {
        Ok(d) => d,
        Err(e) => {
            return CatalogEntry {
                name: name.into(),
                title: None,
                status: EntryStatus::Failed,
                min_gens: None,
                route: None,
                count: None,
                expectations: Vec::new(),
                error: Some(ErrorInfo::from(&e)),
                seconds: t.elapsed().as_secs_f64(),
            }
        }
    };
    let config = run_config(&doc, flags);
    let f = match doc.germ.n() > doc.germ.p() {
        true => reduce_to_core(&doc.germ).map(|r| r.core),
        false => Ok(doc.germ.clone()),
    };
    let analysis: Result<(KSReport, Option<usize>)> = f.and_then(|f| {
        let mut a = KsAnalyzer::new(&f, config.ks)?;
        let ks = a.locate_i1_i2()?;
        let count = match ks.balanced_level() {
            Some(_) => Some(a.min_generators(flags.mode.invariant_mode(), perturbation(flags))?.count),
            None => None,
        };
        Ok((ks, count))
    });
    let run = analysis.as_ref().map_err(Clone::clone).and_then(|_| run_document(&doc, config));
    let mut expectations = Vec::new();
    if let Ok((ks, count)) = &analysis {
        expectations.extend(expect(&doc, "i1", bound_expectation(ks.i1)));
        expectations.extend(expect(&doc, "i2", bound_expectation(ks.i2)));
        if let Some(c) = count {
            expectations.extend(expect(&doc, "min_gens", Expectation::Int(*c as i64)));
        }
    }
    let run = run.and_then(|run| {
        let ok = run.module.reverify(&doc.germ)?.iter().all(|v| *v);
        match ok {
            true => Ok(run),
            false => Err(Error::Consistency("a generator failed independent re-verification".into())),
        }
    });
    let (status, error) = match (&analysis, &run) {
        (Ok(_), Ok(_)) => (EntryStatus::Ok, None),
        (Ok((_, Some(_))), Err(e)) if e.kind() == ErrorKind::ResourceCap => (EntryStatus::CountOnly, Some(ErrorInfo::from(e))),
        (Err(e), _) | (_, Err(e)) => (EntryStatus::Failed, Some(ErrorInfo::from(e))),
    };
    CatalogEntry {
        name: name.into(),
        title: doc.title.clone(),
        status,
        min_gens: analysis.as_ref().ok().and_then(|(_, c)| *c),
        route: run.as_ref().ok().map(|r| r.route),
        count: run.as_ref().ok().map(|r| r.count),
        expectations,
        error,
        seconds: t.elapsed().as_secs_f64(),
    }
}

pub fn catalog(show: Option<&str>, run_all: bool, flags: &Flags) -> Report {
    with_report("catalog", echo(flags), |_| {}, |r| {
        if let Some(name) = show {
            let text = builtin::source(name).ok_or_else(|| Error::Semantic(format!("no catalog entry `{name}`")))?;
            r.document = Some(text.to_string());
            return Ok(());
        }
        let names: Vec<&str> = builtin::names().collect();
        if !run_all {
            let docs = builtin::all()?;
            r.catalog = Some(
                docs.into_iter()
                    .map(|d| CatalogEntry {
                        name: d.name,
                        title: d.title,
                        status: EntryStatus::Listed,
                        min_gens: None,
                        route: None,
                        count: None,
                        expectations: Vec::new(),
                        error: None,
                        seconds: 0.0,
                    })
                    .collect(),
            );
            return Ok(());
        }
        let entries: Vec<CatalogEntry> = names.par_iter().map(|n| run_entry(n, flags)).collect();
        let failed: Vec<&CatalogEntry> = entries.iter().filter(|e| e.status == EntryStatus::Failed).collect();
        let mismatched = entries.iter().filter(|e| e.expectations.iter().any(|x| !x.ok)).count();
        if mismatched > 0 {
            r.warnings.push(format!("{mismatched} entries differ from their recorded expectations"));
        }
        let first = failed.first().and_then(|e| e.error.clone()).map(|mut err| {
            err.message = format!("{} of {} entries failed; first: {}", failed.len(), names.len(), err.message);
            err
        });
        r.catalog = Some(entries);
        r.error = first;
        Ok(())
    })
}
