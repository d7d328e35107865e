//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria that cannot be met are listed in `EXPECTED_RED` with the reason; the test fails if
//! the set of failing criteria differs from that list in either direction.

use std::time::{Duration, Instant};

use liftable_core::document::run::{run_document, DocumentRun, RunConfig, COMPARISON_ORDER};
use liftable_core::document::{catalog, Expectation, GermDocument};
use liftable_core::germs::{reduce_to_core, GermAlgebra, InvariantMode, MultiGerm, VectorFieldGerm};
use liftable_core::ks_maps::{KSReport, KsAnalyzer, KsOptions, LevelBound};
use liftable_core::lift::{compare_modules, solve_lift};
use liftable_core::{Polynomial, Rational};

/// Per-entry wall-clock limit for generator counts.
const COUNT_LIMIT: Duration = Duration::from_secs(30);
/// Wall-clock limit for the formula path on the large four-to-five germ.
const FORMULA_LIMIT: Duration = Duration::from_secs(5);
/// Wall-clock limit for its brute-force confirmation.
const BRUTE_LIMIT: Duration = Duration::from_secs(600);
/// Highest level at which the level-wise δ and γ identities are compared.
const INVARIANT_LEVELS: usize = 3;

/// Criteria known to be red, with the reason.
const EXPECTED_RED: &[(u32, &str)] = &[
    (3, "the printed relation among the surface fields holds only with 3·v5 on the right"),
    (4, "two lines and a cusp has i1 = inf (up to the cap), i2 = 0, not (1, 1)"),
];

struct Suite {
    results: Vec<(u32, bool, String)>,
}

impl Suite {
    fn record(&mut self, id: u32, title: &str, pass: bool, detail: String) {
        println!("{} [{id}] {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((id, pass, detail));
    }
}

fn doc(name: &str) -> GermDocument {
    catalog::load(name).unwrap()
}

fn run(name: &str) -> DocumentRun {
    run_document(&doc(name), RunConfig::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn bound(e: &Expectation) -> Option<LevelBound> {
    match e {
        Expectation::Int(v) => Some(LevelBound::Finite(*v as usize)),
        Expectation::NegInf => Some(LevelBound::NegInfinity),
        _ => None,
    }
}

fn report(f: &MultiGerm) -> KSReport {
    KsAnalyzer::new(f, KsOptions::default()).and_then(|mut a| a.locate_i1_i2()).unwrap()
}

fn counts(s: &mut Suite) {
    let expected: &[(&str, usize)] = &[
        ("phi-n2", 2),
        ("phi-n3", 3),
        ("phik-2", 4),
        ("phik-3", 7),
        ("whitney-psi2", 4),
        ("whitney-psi3", 11),
        ("multistable", 2),
        ("ex35-a", 2),
        ("cusp-pair", 2),
        ("ex35-c", 2),
        ("ex36-plus", 2),
        ("ex36-minus", 2),
        ("s66", 3),
    ];
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, want) in expected {
        let t = Instant::now();
        let r = run(name);
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        let independent = r.module.count_expected.map_or(true, |c| c == r.count);
        if r.count != *want || !independent || dt > COUNT_LIMIT {
            bad.push(format!("{name}: {} via {:?} in {dt:.1?}", r.count, r.route));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} counts match, slowest {slowest:.2?} (limit {COUNT_LIMIT:?})", expected.len())
    } else {
        bad.join("; ")
    };
    s.record(1, "minimal generator counts", bad.is_empty(), detail);
}

fn large_formula(s: &mut Suite) {
    let f = doc("rrw-4to5").germ;
    let t = Instant::now();
    let mut a = KsAnalyzer::new(&f, KsOptions::default()).unwrap();
    let level = a.locate_i1_i2().unwrap().balanced_level();
    let formula = level.map(|i| a.kernel_formula(i, InvariantMode::Formula).unwrap());
    let formula_time = t.elapsed();
    let t = Instant::now();
    let mut fresh = KsAnalyzer::new(&f, KsOptions::default()).unwrap();
    let brute = level.map(|i| fresh.model(i + 1).unwrap().kernel_dim());
    let brute_time = t.elapsed();
    let pass = formula == Some(17) && brute == Some(17) && formula_time <= FORMULA_LIMIT && brute_time <= BRUTE_LIMIT;
    s.record(
        2,
        "four-to-five germ count",
        pass,
        format!("formula {formula:?} in {formula_time:.2?} (limit {FORMULA_LIMIT:?}), elimination {brute:?} in {brute_time:.2?}"),
    );
}

/// `−Y v1 + U v2 + s·X v4 − c·v5`, with `s = ±1` the sign of the surface.
fn surface_relation(refs: &[VectorFieldGerm], sign: i64, c: i64) -> VectorFieldGerm {
    let p = 3;
    let (x, y, u) = (Polynomial::var(p, 0), Polynomial::var(p, 1), Polynomial::var(p, 2));
    refs[0]
        .mul_poly(&-y)
        .add(&refs[1].mul_poly(&u))
        .add(&refs[3].mul_poly(&x.scale(&Rational::from_integer(sign.into()))))
        .sub(&refs[4].scale(&Rational::from_integer(c.into())))
}

fn explicit_sets(s: &mut Suite) {
    let entries = ["whitney-psi2", "whitney-psi3", "multistable", "cusp-pair", "s66", "s67-k1", "s67-k2", "umbrella-k1", "umbrella-k2", "s69"];
    let mut bad = Vec::new();
    for name in entries {
        let r = run(name);
        match &r.comparison {
            Some(c) if c.equal() && c.cert >= COMPARISON_ORDER => {}
            other => bad.push(format!("{name}: {other:?}")),
        }
    }
    let transported = run("whitney-psi2").transport.and_then(|t| t.comparison);
    let transport_ok = transported.as_ref().is_some_and(|c| c.equal() && c.cert >= COMPARISON_ORDER);
    if !transport_ok {
        bad.push(format!("shear transport: {transported:?}"));
    }
    let mut literal_fail = Vec::new();
    let mut tripled_ok = true;
    for (name, sign) in [("s68-k1-plus", 1), ("s68-k1-minus", -1), ("s68-k2-plus", 1), ("s68-k2-minus", -1)] {
        let refs = doc(name).references;
        if !surface_relation(&refs, sign, 1).is_zero() {
            literal_fail.push(name);
        }
        tripled_ok &= surface_relation(&refs, sign, 3).is_zero();
    }
    let pass = bad.is_empty() && literal_fail.is_empty();
    let detail = format!(
        "{}/{} sets equal at order {COMPARISON_ORDER}, shear transport {}, printed relation fails for [{}], relation with 3·v5 {}",
        entries.len() - bad.iter().filter(|b| !b.starts_with("shear")).count(),
        entries.len(),
        if transport_ok { "equal" } else { "differs" },
        literal_fail.join(", "),
        if tripled_ok { "holds" } else { "fails" },
    );
    let detail = if bad.is_empty() { detail } else { format!("{detail}; {}", bad.join("; ")) };
    s.record(3, "explicit generator sets", pass, detail);
}

fn placements(s: &mut Suite) {
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in catalog::all().unwrap() {
        let (Some(i1), Some(i2)) = (d.expectation("i1").and_then(bound), d.expectation("i2").and_then(bound)) else {
            continue;
        };
        checked += 1;
        let r = report(&d.germ);
        if r.i1 != i1 || r.i2 != i2 {
            bad.push(format!("{}: ({}, {}) expected ({i1}, {i2})", d.name, r.i1, r.i2));
        }
    }
    let e0 = run("E0");
    let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
    let z = Polynomial::zero(2);
    let euler = [VectorFieldGerm::new(vec![x, z.clone()]).unwrap(), VectorFieldGerm::new(vec![z, y]).unwrap()];
    let cmp = compare_modules(&e0.module.generators, &euler, COMPARISON_ORDER, e0.constructed_on.target_vars()).unwrap();
    if e0.count != 2 || !cmp.equal() {
        bad.push(format!("E0: {} generators, equal to X∂X, Y∂Y: {}", e0.count, cmp.equal()));
    }
    let detail = if bad.is_empty() { format!("{checked} placements match") } else { format!("{}/{checked} placements match; {}", checked - bad.len(), bad.join("; ")) };
    s.record(4, "i1/i2 placements", bad.is_empty(), detail);
}

/// Entries the level analysis applies to: corank at most one and `n <= p`.
fn analysable() -> Vec<GermDocument> {
    catalog::all().unwrap().into_iter().filter(|d| d.germ.n() <= d.germ.p() && d.germ.corank() <= 1).collect()
}

fn differential_consistency(s: &mut Suite) {
    let mut bad = Vec::new();
    let mut kernel_checks = 0;
    let mut invariant_checks = 0;
    for d in analysable() {
        let opts = KsOptions::default();
        let mut a = KsAnalyzer::new(&d.germ, opts).unwrap();
        let r = a.locate_i1_i2().unwrap();
        let top = match r.i1 {
            LevelBound::Finite(i1) => (i1 + 2).min(opts.max_i - 1),
            _ => r.levels.len().saturating_sub(2),
        };
        for i in 0..=top {
            if !a.model(i + 1).unwrap().is_surjective() {
                continue;
            }
            kernel_checks += 1;
            let formula = a.kernel_formula(i, InvariantMode::Formula).unwrap();
            let brute = a.model(i + 1).unwrap().kernel_dim() as i64;
            if formula != brute {
                bad.push(format!("{} level {}: formula {formula}, elimination {brute}", d.name, i + 1));
            }
        }
        let alg = a.algebra_mut();
        for i in 0..=INVARIANT_LEVELS {
            invariant_checks += 1;
            let (fd, fg) = (alg.formula_delta(i), alg.formula_gamma(i));
            let (bd, bg) = (alg.level_delta(i), alg.level_gamma(i).unwrap());
            if (fd, fg) != (bd, bg) {
                bad.push(format!("{} level {i}: formula ({fd}, {fg}), elimination ({bd}, {bg})", d.name));
            }
        }
    }
    let detail = format!("{kernel_checks} kernel dimensions and {invariant_checks} (δ, γ) pairs compared, {} mismatches", bad.len());
    let detail = if bad.is_empty() { detail } else { format!("{detail}: {}", bad.join("; ")) };
    s.record(5, "formula and elimination agree", bad.is_empty(), detail);
}

fn properties(s: &mut Suite) {
    let mut bad = Vec::new();
    let mut stable_entries = 0;
    for d in analysable() {
        let f = &d.germ;
        let r = report(f);
        let lv = &r.levels;
        for i in 0..lv.len() {
            for j in i + 1..lv.len() {
                if (lv[i].surjective && !lv[j].surjective) || (lv[j].injective && !lv[i].injective) {
                    bad.push(format!("{}: monotonicity between levels {i} and {j}", d.name));
                }
            }
        }
        if let (LevelBound::Finite(a), LevelBound::Finite(b)) = (r.i1, r.i2) {
            if a < b {
                bad.push(format!("{}: i1 < i2", d.name));
            }
        }
        if let Some(i) = r.balanced_level() {
            for (j, l) in lv.iter().enumerate() {
                let want = (j >= i, j <= i);
                if (l.surjective, l.injective) != want {
                    bad.push(format!("{}: level {j} is (surjective {}, injective {})", d.name, l.surjective, l.injective));
                }
            }
        }
        let mut alg = GermAlgebra::new(f, KsOptions::default().multiplicity_cap).unwrap();
        if lv[0].surjective {
            stable_entries += 1;
            let (p, n) = (f.p() as i64, f.n() as i64);
            let identity = p == (p - n) * alg.delta() as i64 + alg.level_gamma(0).unwrap() as i64;
            if identity != lv[0].injective {
                bad.push(format!("{}: Mather identity {identity}, isolated {}", d.name, lv[0].injective));
            }
        }
        let parts: usize = f
            .branches()
            .iter()
            .map(|b| {
                let single = MultiGerm::new(f.target_vars().to_vec(), vec![b.clone()]).unwrap();
                GermAlgebra::new(&single, KsOptions::default().multiplicity_cap).unwrap().delta()
            })
            .sum();
        if parts != alg.delta() {
            bad.push(format!("{}: δ {} but branches sum to {parts}", d.name, alg.delta()));
        }
    }
    let detail = format!("{} entries, {stable_entries} stable; {} violations", analysable().len(), bad.len());
    let detail = if bad.is_empty() { detail } else { format!("{detail}: {}", bad.join("; ")) };
    s.record(6, "structural properties", bad.is_empty(), detail);
}

fn suspension(s: &mut Suite) {
    let suspended = doc("suspended-69");
    let base = doc("s69");
    let core = reduce_to_core(&suspended.germ).unwrap().core;
    let same_core = core.branches().iter().zip(base.germ.branches()).all(|(a, b)| a.components() == b.components());
    let rs = run("suspended-69");
    let rb = run("s69");
    let cmp = compare_modules(&rs.module.generators, &rb.module.generators, COMPARISON_ORDER, suspended.germ.target_vars()).unwrap();
    let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
    let field = |s: i64| {
        VectorFieldGerm::new(vec![y.pow(2).scale(&Rational::from_integer(9.into())), (&x.pow(2) * &y).scale(&Rational::from_integer((2 * s).into()))]).unwrap()
    };
    let minus = solve_lift(&suspended.germ, &field(-1), 24).unwrap().is_lifted();
    let plus = solve_lift(&suspended.germ, &field(1), 24).unwrap().is_lifted();
    let pass = same_core && cmp.equal() && minus && !plus;
    s.record(
        7,
        "suspension equivalence",
        pass,
        format!(
            "core matches bigerm: {same_core}, modules equal at order {}: {}, certified sign: {}",
            cmp.cert,
            cmp.equal(),
            match (minus, plus) {
                (true, false) => "−2X²Y∂Y lifts, +2X²Y∂Y does not",
                _ => "undetermined",
            }
        ),
    );
}

fn reverification(s: &mut Suite) {
    let mut failures = Vec::new();
    let mut fields = 0;
    let mut skipped = Vec::new();
    for d in catalog::all().unwrap() {
        let r = match run_document(&d, RunConfig::default()) {
            Ok(r) => r,
            Err(e) => {
                skipped.push(format!("{} ({})", d.name, e));
                continue;
            }
        };
        let mut modules = vec![(&d.germ, &r.module)];
        if let Some(t) = &r.transport {
            modules.push((&t.target, &t.module));
        }
        for (g, m) in modules {
            let ok = m.reverify(g).unwrap();
            fields += ok.len();
            failures.extend(ok.iter().enumerate().filter(|(_, v)| !**v).map(|(k, _)| format!("{} generator {}", d.name, k + 1)));
        }
    }
    let detail = format!("{fields} certificates re-verified, {} failures; no generators emitted for [{}]", failures.len(), skipped.join(", "));
    s.record(8, "certificate re-verification", failures.is_empty(), detail);
}

#[test]
fn acceptance() {
    let mut s = Suite { results: Vec::new() };
    counts(&mut s);
    large_formula(&mut s);
    explicit_sets(&mut s);
    placements(&mut s);
    differential_consistency(&mut s);
    properties(&mut s);
    suspension(&mut s);
    reverification(&mut s);
    for (id, why) in EXPECTED_RED {
        println!("known red [{id}]: {why}");
    }
    let red: Vec<u32> = s.results.iter().filter(|(_, p, _)| !p).map(|(id, _, _)| *id).collect();
    let expected: Vec<u32> = EXPECTED_RED.iter().map(|(id, _)| *id).collect();
    assert_eq!(red, expected, "failing criteria differ from the documented set");
}
