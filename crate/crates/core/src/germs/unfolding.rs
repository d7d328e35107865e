//! One-parameter unfoldings `F(x, λ) = (f_λ(x), λ)` and the squaring map on the parameter.

use crate::algebra::{int, monomials_of_degree, MonomialOrder, Polynomial};
use crate::error::{Error, Result};
use crate::germs::{Branch, MultiGerm};
use crate::ks_maps::{KsAnalyzer, KsOptions};

/// A verified one-parameter unfolding of `base`.
///
/// Invariants: `unfolding` has source variable `source_parameter` and target coordinate
/// `parameter_index` with `F_parameter_index = λ` on every branch, and setting `λ = 0` and
/// deleting that coordinate gives `base` branch by branch.
#[derive(Clone, Debug)]
pub struct UnfoldingSpec {
    pub unfolding: MultiGerm,
    pub parameter_index: usize,
    pub source_parameter: usize,
    pub base: MultiGerm,
    /// `(X, Λ) ↦ (X, Λ²)` on the target of `unfolding`.
    pub squaring: MultiGerm,
    pub stable: bool,
    pub isolated: bool,
}

/// How to obtain the unfolding.
#[derive(Clone, Debug)]
pub enum UnfoldingMode {
    /// `F` given; the parameter is target coordinate `parameter_index` and source variable `source_parameter`.
    User { unfolding: MultiGerm, parameter_index: usize, source_parameter: usize },
    /// Breadth-first search over `f + λ·m·e_q` with monomials `m` of degree at most `max_degree`.
    Auto { max_degree: u32 },
}

/// `(X, Λ) ↦ (X, Λ²)` with `Λ` at position `parameter_index` among `p` target coordinates.
pub fn squaring_map(p: usize, parameter_index: usize, target_vars: &[String]) -> Result<MultiGerm> {
    let comps: Vec<Polynomial> = (0..p)
        .map(|j| if j == parameter_index { Polynomial::var(p, j).pow(2) } else { Polynomial::var(p, j) })
        .collect();
    MultiGerm::new(target_vars.to_vec(), vec![Branch::new("g", target_vars.to_vec(), comps)?])
}

fn check_slice(f: &MultiGerm, big: &MultiGerm, t: usize, s: usize) -> Result<()> {
    if big.p() != f.p() + 1 || big.n() != f.n() + 1 {
        return Err(Error::Ambient(format!(
            "unfolding is {} -> {}, base is {} -> {}",
            big.n(),
            big.p(),
            f.n(),
            f.p()
        )));
    }
    if big.branch_count() != f.branch_count() {
        return Err(Error::Ambient("unfolding and base have different branch counts".into()));
    }
    if t >= big.p() || s >= big.n() {
        return Err(Error::Arity(format!("parameter index out of range (target {t}, source {s})")));
    }
    let lambda = Polynomial::var(big.n(), s);
    for (bb, fb) in big.branches().iter().zip(f.branches()) {
        if bb.components()[t] != lambda {
            return Err(Error::Semantic(format!("branch {}: parameter component is not the parameter", bb.label())));
        }
        let restricted: Vec<Polynomial> = bb
            .components()
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != t)
            .map(|(_, c)| c.eliminate_var_at_zero(s))
            .collect();
        if restricted != fb.components() {
            return Err(Error::Semantic(format!("branch {}: restriction to the zero parameter is not the base germ", bb.label())));
        }
    }
    Ok(())
}

fn stability(big: &MultiGerm, opts: KsOptions) -> Result<(bool, bool)> {
    let s = KsAnalyzer::new(big, opts)?.classify_stable()?;
    Ok((s.stable, s.isolated))
}

fn spec(f: &MultiGerm, big: MultiGerm, t: usize, s: usize, opts: KsOptions) -> Result<UnfoldingSpec> {
    check_slice(f, &big, t, s)?;
    let (stable, isolated) = stability(&big, opts)?;
    let squaring = squaring_map(big.p(), t, big.target_vars())?;
    Ok(UnfoldingSpec { unfolding: big, parameter_index: t, source_parameter: s, base: f.clone(), squaring, stable, isolated })
}

/// `f` with the parameter appended last in source and target, plus `λ·m` added to `(branch, comp)`.
fn candidate(f: &MultiGerm, extra: Option<(usize, usize, &Polynomial)>) -> Result<MultiGerm> {
    let n = f.n();
    let lambda = Polynomial::var(n + 1, n);
    let mut names = f.target_vars().to_vec();
    names.push(fresh_name(&names, "L"));
    let branches = f
        .branches()
        .iter()
        .enumerate()
        .map(|(b, br)| {
            let mut comps: Vec<Polynomial> = br.components().iter().map(|c| c.insert_var(n)).collect();
            if let Some((eb, q, m)) = extra {
                if eb == b {
                    comps[q] = &comps[q] + &(&m.insert_var(n) * &lambda);
                }
            }
            comps.push(lambda.clone());
            let mut src = br.source_vars().to_vec();
            src.push(fresh_name(&src, "l"));
            Branch::new(br.label(), src, comps)
        })
        .collect::<Result<Vec<_>>>()?;
    MultiGerm::new(names, branches)
}

fn fresh_name(taken: &[String], base: &str) -> String {
    std::iter::once(base.to_string())
        .chain((1..).map(|k| format!("{base}{k}")))
        .find(|c| !taken.contains(c))
        .expect("unbounded candidates")
}

/// Builds and verifies a one-parameter unfolding of `f`.
///
/// User mode only verifies the slice condition and reports stability. Auto mode returns the
/// first isolated stable candidate in the order (degree, branch, component, monomial).
pub fn build_unfolding(f: &MultiGerm, mode: UnfoldingMode, opts: KsOptions) -> Result<UnfoldingSpec> {
    match mode {
        UnfoldingMode::User { unfolding, parameter_index, source_parameter } => {
            spec(f, unfolding, parameter_index, source_parameter, opts)
        }
        UnfoldingMode::Auto { max_degree } => {
            let n = f.n();
            for d in 0..=max_degree {
                for b in 0..f.branch_count() {
                    for q in 0..f.p() {
                        for m in monomials_of_degree(n, d, MonomialOrder::Grlex) {
                            let mono = Polynomial::monomial(m, int(1));
                            let big = candidate(f, Some((b, q, &mono)))?;
                            match stability(&big, opts) {
                                Ok((true, true)) => return spec(f, big, f.p(), n, opts),
                                Ok(_) => {}
                                Err(e) if e.kind() == crate::error::ErrorKind::Hypothesis => {}
                                Err(e) => return Err(e),
                            }
                        }
                    }
                }
            }
            Err(Error::ResourceCap(format!("no isolated stable one-parameter unfolding with terms λ·m, deg m ≤ {max_degree}")))
        }
    }
}
