//! Completing kernel classes of the first non-injective level to liftable fields.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{Branch, InvariantMode, MonomialIndex, MultiGerm, VectorFieldGerm};
use crate::ks_maps::{stable_order, KsAnalyzer, KsOptions};
use crate::lift::{minimize, nakayama_count, LiftModule, Provenance};
use crate::polymodule::sparse::{normalize_rat, LinearSystem, RatRow};

/// Largest unknown count accepted by one ansatz solve.
const ANSATZ_UNKNOWN_LIMIT: usize = 20_000;

/// Largest equation count per branch accepted by one ansatz solve.
const EQUATION_LIMIT: usize = 60_000;

/// Largest level-model domain built by the correction strategy.
const CORRECTION_DOMAIN_LIMIT: u64 = 4_000;

/// Target jet order for Nakayama counts: a margin past the generators' degrees, at most `cert`.
pub fn count_order(gens: &[VectorFieldGerm], cert: u32) -> u32 {
    let d = gens.iter().filter_map(VectorFieldGerm::degree).max().unwrap_or(0);
    (d + 2).max(12).min(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Bounded-degree ansatz for the correction, solved in one linear system.
    Ansatz,
    /// Level-by-level subtraction of preimages under the surjective level maps.
    Correction,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompletionConfig {
    /// Highest degree of the correction; defaults to `2·(i+2)·ℓ`.
    pub max_degree: Option<u32>,
    /// Certification order; defaults to `ℓ(i+2) + 1 + max_degree`.
    pub cert: Option<u32>,
    /// Force one strategy; by default the ansatz is tried first.
    pub strategy: Option<Strategy>,
    pub ks: KsOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionStep {
    pub strategy: Strategy,
    /// Degree bound of the correction that succeeded.
    pub degree: u32,
    /// Whether the ansatz closed with an exact polynomial identity.
    pub exact_ansatz: bool,
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub module: LiftModule,
    pub level: usize,
    pub steps: Vec<CompletionStep>,
    pub max_degree: u32,
}

/// Target monomials pulled back along one branch, truncated below `bound`.
struct Pullbacks {
    index: MonomialIndex,
    values: Vec<Polynomial>,
}

impl Pullbacks {
    fn new(branch: &Branch, max_degree: u32, bound: Option<u32>) -> Self {
        let p = branch.p();
        let mut index = MonomialIndex::new(p);
        index.ensure(max_degree + 1);
        let total = index.count_below(max_degree + 1);
        let mut values: Vec<Polynomial> = Vec::with_capacity(total);
        values.push(Polynomial::one(branch.n()));
        for k in 1..total {
            let m = index.mono(k).clone();
            let t = (0..p).find(|&t| m.exp(t) > 0).expect("nonconstant monomial");
            let prev = index.get(&crate::algebra::Monomial::var(p, t).quotient_of(&m).expect("divisible")).expect("lower degree");
            values.push(values[prev].mul_truncated(&branch.components()[t], bound));
        }
        Pullbacks { index, values }
    }
}

fn max_degree_of(polys: &[Polynomial]) -> u32 {
    polys.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
}

/// Solves for `η̃` of degrees `lo..=hi` with `η + η̃` lifting along every branch.
///
/// With `cert = None` the identity must hold exactly; otherwise modulo `m^cert`.
fn ansatz(f: &MultiGerm, eta: &VectorFieldGerm, lo: u32, hi: u32, cert: Option<u32>) -> Option<VectorFieldGerm> {
    let p = f.p();
    let eta_deg = eta.degree().unwrap_or(0);
    struct Plan {
        xi_bound: u32,
        eq_bound: u32,
        xi_index: MonomialIndex,
        xi_off: usize,
    }
    let mut plans = Vec::new();
    let mut cols = 0usize;
    for b in f.branches() {
        let d_f = max_degree_of(b.components()).max(1);
        let d_jac = max_degree_of(&b.jacobian().concat());
        let rhs_deg = eta_deg.max(hi) * d_f;
        let (xi_bound, eq_bound) = match cert {
            Some(c) => (c, c),
            None => (rhs_deg + 1, rhs_deg + d_jac + 1),
        };
        let n = b.n() as u64;
        let below = |d: u32| crate::algebra::binomial(n + d as u64 - 1, n) as usize;
        if below(eq_bound) * p > EQUATION_LIMIT {
            return None;
        }
        cols += below(xi_bound) * b.n();
        if cols > ANSATZ_UNKNOWN_LIMIT {
            return None;
        }
        let mut xi_index = MonomialIndex::new(b.n());
        xi_index.ensure(xi_bound.max(eq_bound));
        plans.push(Plan { xi_bound, eq_bound, xi_index, xi_off: cols - below(xi_bound) * b.n() });
    }
    let target_below = |d: u32| crate::algebra::binomial(p as u64 + d as u64 - 1, p as u64) as usize;
    if cols + (target_below(hi + 1) - target_below(lo)) * p > ANSATZ_UNKNOWN_LIMIT {
        return None;
    }
    let mut target_index = MonomialIndex::new(p);
    target_index.ensure(hi + 1);
    let (c_lo, c_hi) = (target_index.count_below(lo), target_index.count_below(hi + 1));
    let c_off = cols;
    cols += (c_hi - c_lo) * p;
    if cols > ANSATZ_UNKNOWN_LIMIT {
        return None;
    }

    // Equations keyed by (degree, branch, monomial index * p + component).
    let mut rows: BTreeMap<(u32, usize, usize), RatRow> = BTreeMap::new();
    let mut rhs: BTreeMap<(u32, usize, usize), Rational> = BTreeMap::new();
    for (bi, (b, plan)) in f.branches().iter().zip(&plans).enumerate() {
        let n = b.n();
        let idx = &plan.xi_index;
        let key = |m: &crate::algebra::Monomial, q: usize| (m.degree(), bi, idx.get(m).expect("index covers bound") * p + q);
        for (m, col) in b.jacobian().iter().enumerate() {
            for mi in 0..idx.count_below(plan.xi_bound) {
                let mu = idx.mono(mi);
                for (q, d) in col.iter().enumerate() {
                    for (dm, dc) in d.terms() {
                        let nu = mu.mul(dm);
                        if nu.degree() < plan.eq_bound {
                            rows.entry(key(&nu, q)).or_default().push((plan.xi_off + mi * n + m, dc.clone()));
                        }
                    }
                }
            }
        }
        let pulls = Pullbacks::new(b, hi, Some(plan.eq_bound));
        for t in c_lo..c_hi {
            let v = &pulls.values[pulls.index.get(target_index.mono(t)).expect("same ordering")];
            for (m, c) in v.terms() {
                if m.degree() < plan.eq_bound {
                    for q in 0..p {
                        rows.entry(key(m, q)).or_default().push((c_off + (t - c_lo) * p + q, -c.clone()));
                    }
                }
            }
        }
        let composed = eta.compose(b, None).ok()?;
        for (q, comp) in composed.iter().enumerate() {
            for (m, c) in comp.terms() {
                if m.degree() < plan.eq_bound {
                    rhs.insert(key(m, q), c.clone());
                } else if cert.is_none() {
                    return None;
                }
            }
        }
    }
    let mut keys: Vec<_> = rows.keys().chain(rhs.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut sys = LinearSystem::new(cols);
    let zero = Rational::zero();
    for k in keys {
        let row = rows.remove(&k).map(normalize_rat).unwrap_or_default();
        if !sys.add_equation(&row, rhs.get(&k).unwrap_or(&zero)) {
            return None;
        }
    }
    let x = sys.solution()?;
    let mut comps = eta.comps().to_vec();
    for t in c_lo..c_hi {
        for (q, comp) in comps.iter_mut().enumerate() {
            let c = &x[c_off + (t - c_lo) * p + q];
            if !c.is_zero() {
                comp.add_term(target_index.mono(t).clone(), c.clone());
            }
        }
    }
    VectorFieldGerm::new(comps).ok()
}

/// Subtracts level-`k` preimages for `k = start, start+1, …` until `f*m₀ᵏ ⊆ m^cert` on every branch.
fn correct(analyzer: &mut KsAnalyzer, eta: &VectorFieldGerm, start: usize, cert: u32) -> Result<VectorFieldGerm> {
    let f = analyzer.germ().clone();
    let min_order = f
        .branches()
        .iter()
        .map(|b| b.components().iter().filter_map(Polynomial::order).min().unwrap_or(1).max(1))
        .min()
        .unwrap_or(1);
    let last = (cert as usize).div_ceil(min_order as usize);
    let mut eta = eta.clone();
    let p = f.p() as u64;
    for k in start..last.max(start) {
        if crate::algebra::binomial(p + k as u64 - 1, k as u64) * p > CORRECTION_DOMAIN_LIMIT {
            return Err(Error::ResourceCap(format!("level {k} model exceeds {CORRECTION_DOMAIN_LIMIT} domain fields")));
        }
        let per_branch = f.branches().iter().map(|b| eta.compose(b, None)).collect::<Result<Vec<_>>>()?;
        let (model, alg) = analyzer.model_and_algebra(k)?;
        let v = model.embed(alg, &per_branch);
        let coords = model.coordinates(&v)?;
        if coords.is_empty() {
            continue;
        }
        let zeta = model.preimage(&coords).ok_or_else(|| Error::Hypothesis(format!("level {k} is not surjective")))?;
        eta = eta.sub(&zeta);
    }
    Ok(eta)
}

/// Liftable completions of a basis of `ker ᵢ₊₁ω̄f`, where `i = i₁ = i₂`.
pub fn complete_generators(f: &MultiGerm, config: CompletionConfig) -> Result<Completion> {
    let mut analyzer = KsAnalyzer::new(f, config.ks)?;
    let count = analyzer.min_generators(InvariantMode::BothAgree, 0).map_err(|e| match e {
        Error::Hypothesis(m) => Error::Hypothesis(format!("completion needs i1 = i2: {m}")),
        other => other,
    })?;
    let i = count.level;
    let ell = stable_order(analyzer.algebra());
    let max_degree = config.max_degree.unwrap_or(2 * (i as u32 + 2) * ell);
    let cert = config.cert.unwrap_or(ell * (i as u32 + 2) + 1 + max_degree);
    let kernel = analyzer.model(i + 1)?.kernel_fields();
    let lo = i as u32 + 2;

    let mut generators = Vec::new();
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    for (j, eta) in kernel.iter().enumerate() {
        let mut done = None;
        if config.strategy != Some(Strategy::Correction) {
            // Degree `lo - 1` means no correction at all.
            for d in lo - 1..=max_degree.max(lo) {
                if let Some(g) = ansatz(f, eta, lo, d, None) {
                    done = Some((g, CompletionStep { strategy: Strategy::Ansatz, degree: d, exact_ansatz: true }));
                    break;
                }
            }
            if done.is_none() {
                if let Some(g) = ansatz(f, eta, lo, max_degree.max(lo), Some(cert)) {
                    done = Some((g, CompletionStep { strategy: Strategy::Ansatz, degree: max_degree, exact_ansatz: false }));
                }
            }
        }
        if done.is_none() && config.strategy != Some(Strategy::Ansatz) {
            let g = correct(&mut analyzer, eta, i + 2, cert)?;
            done = Some((g, CompletionStep { strategy: Strategy::Correction, degree: cert.saturating_sub(1), exact_ansatz: false }));
        }
        let Some((g, step)) = done else {
            return Err(Error::ResourceCap(format!("no polynomial completion within degree {max_degree} for kernel element {}", j + 1)));
        };
        if !step.exact_ansatz {
            warnings.push(format!("generator {}: no exact polynomial completion within degree {max_degree}", j + 1));
        }
        generators.push(g);
        steps.push(step);
    }
    let provenance = if steps.iter().all(|s| s.strategy == Strategy::Ansatz) { Provenance::KernelAnsatz } else { Provenance::KernelCorrection };
    let mut module = LiftModule::certify(f, generators, cert, provenance)?;
    module.count_expected = Some(count.count);
    module.warnings = warnings;
    let order = count_order(&module.generators, cert);
    let nk = nakayama_count(f.p(), order, &module.generators);
    if nk != count.count || minimize(f.p(), order, &module.generators).len() != count.count {
        return Err(Error::Consistency(format!("completed set has {nk} Nakayama generators, expected {}", count.count)));
    }
    Ok(Completion { module, level: i, steps, max_degree })
}
