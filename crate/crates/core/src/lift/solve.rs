//! Lifting a target field along each branch: find `ξ` with `df·ξ = η∘f`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{format_rational, JetTruncation, Monomial, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{Branch, MonomialIndex, MultiGerm, VectorFieldGerm};
use crate::polymodule::sparse::{normalize_rat, to_int_row, Echelon, LinearSystem, RatRow};

/// Largest unknown count for the exact (untruncated) polynomial attempt.
const EXACT_UNKNOWN_LIMIT: usize = 12_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchLift {
    pub label: String,
    /// Source field, one polynomial per source variable.
    #[serde(skip)]
    pub xi: Vec<Polynomial>,
    /// `None` when the residual is identically zero, else its lowest degree (at least `cert`).
    pub residual_order: Option<u32>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCertificate {
    pub eta: VectorFieldGerm,
    pub branches: Vec<BranchLift>,
    pub cert: u32,
}

impl LiftCertificate {
    pub fn exact(&self) -> bool {
        self.branches.iter().all(|b| b.exact)
    }

    /// Recomputes `df·ξ − η∘f` from scratch and checks it vanishes below `cert` on every branch.
    pub fn recheck(&self, f: &MultiGerm) -> Result<bool> {
        for (b, bl) in f.branches().iter().zip(&self.branches) {
            let lhs = b.tf(&bl.xi);
            let rhs = self.eta.compose(b, None)?;
            for (l, r) in lhs.iter().zip(&rhs) {
                let d = l - r;
                if bl.exact && !d.is_zero() {
                    return Ok(false);
                }
                if d.order().is_some_and(|o| o < self.cert) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A linear functional on the coefficients of `η∘f` that vanishes on `df(θ)` but not on `η∘f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub branch: String,
    pub degree: u32,
    /// Terms `(component, source monomial, weight)`.
    pub functional: Vec<(usize, Monomial, Rational)>,
}

impl Obstruction {
    pub fn render(&self, source_names: &[String], target_names: &[String]) -> String {
        let terms: Vec<String> = self
            .functional
            .iter()
            .map(|(q, m, c)| format!("{}·[{}]_{}", format_rational(c), m.render(source_names), target_names[*q]))
            .collect();
        terms.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    Lifted(LiftCertificate),
    Obstructed(Obstruction),
}

impl LiftOutcome {
    pub fn into_result(self) -> Result<LiftCertificate> {
        match self {
            LiftOutcome::Lifted(c) => Ok(c),
            LiftOutcome::Obstructed(o) => Err(Error::NotLiftable { branch: o.branch, degree: o.degree }),
        }
    }

    pub fn is_lifted(&self) -> bool {
        matches!(self, LiftOutcome::Lifted(_))
    }
}

/// Linear system `df·ξ = rhs` for one branch with `ξ` supported in degrees `< xi_bound` and
/// equations on monomials of degree `< eq_bound`.
struct BranchSystem {
    n: usize,
    p: usize,
    index: MonomialIndex,
    xi_cols: usize,
    /// Equation rows keyed by `monomial index * p + component`.
    rows: BTreeMap<usize, RatRow>,
}

impl BranchSystem {
    fn new(branch: &Branch, xi_bound: u32, eq_bound: u32) -> Self {
        let (n, p) = (branch.n(), branch.p());
        let mut index = MonomialIndex::new(n);
        index.ensure(eq_bound.max(xi_bound));
        let xi_cols = index.count_below(xi_bound) * n;
        let jac = branch.jacobian();
        let mut rows: BTreeMap<usize, RatRow> = BTreeMap::new();
        for mi in 0..index.count_below(xi_bound) {
            let mu = index.mono(mi).clone();
            for (m, col) in jac.iter().enumerate() {
                let unknown = mi * n + m;
                for (q, d) in col.iter().enumerate() {
                    for (dm, dc) in d.terms() {
                        if mu.degree() + dm.degree() >= eq_bound {
                            continue;
                        }
                        let key = index.get(&mu.mul(dm)).expect("index covers bound") * p + q;
                        rows.entry(key).or_default().push((unknown, dc.clone()));
                    }
                }
            }
        }
        BranchSystem { n, p, index, xi_cols, rows }
    }

    fn equation_degree(&self, key: usize) -> u32 {
        self.index.mono(key / self.p).degree()
    }

    fn rhs_map(&self, rhs: &[Polynomial], eq_bound: u32) -> BTreeMap<usize, Rational> {
        let mut out = BTreeMap::new();
        for (q, r) in rhs.iter().enumerate() {
            for (m, c) in r.terms() {
                if m.degree() < eq_bound {
                    out.insert(self.index.get(m).expect("index covers bound") * self.p + q, c.clone());
                }
            }
        }
        out
    }

    fn keys(&self, rhs: &BTreeMap<usize, Rational>) -> Vec<usize> {
        let mut keys: Vec<usize> = self.rows.keys().chain(rhs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    /// Solves, adding equations by ascending degree. `Err(key)` names the first inconsistent equation.
    fn solve(&self, rhs: &BTreeMap<usize, Rational>) -> std::result::Result<Vec<Polynomial>, usize> {
        let mut sys = LinearSystem::new(self.xi_cols);
        let zero = Rational::zero();
        for key in self.keys(rhs) {
            let row = self.rows.get(&key).map(|r| normalize_rat(r.clone())).unwrap_or_default();
            if !sys.add_equation(&row, rhs.get(&key).unwrap_or(&zero)) {
                return Err(key);
            }
        }
        let x = sys.solution().expect("consistent");
        let mut xi = vec![Polynomial::zero(self.n); self.n];
        for (col, c) in x.into_iter().enumerate() {
            if !c.is_zero() {
                xi[col % self.n].add_term(self.index.mono(col / self.n).clone(), c);
            }
        }
        Ok(xi)
    }

    /// A combination of the equations up to the failing degree that kills every unknown but not the right-hand side.
    fn obstruction(&self, rhs: &BTreeMap<usize, Rational>, degree: u32) -> Vec<(usize, Monomial, Rational)> {
        let keys: Vec<usize> = self.keys(rhs).into_iter().filter(|k| self.equation_degree(*k) <= degree).collect();
        let base = self.xi_cols + 1;
        let mut ech = Echelon::new(base + keys.len());
        for (t, key) in keys.iter().enumerate() {
            let mut row = self.rows.get(key).cloned().unwrap_or_default();
            if let Some(c) = rhs.get(key) {
                row.push((self.xi_cols, c.clone()));
            }
            row.push((base + t, Rational::from_integer(1.into())));
            let (int_row, _) = to_int_row(&normalize_rat(row));
            let (w, _) = ech.reduce(int_row);
            if w.first().is_some_and(|(c, _)| *c == self.xi_cols) {
                let lead = Rational::from_integer(w[0].1.clone());
                return w
                    .iter()
                    .filter(|(c, _)| *c >= base)
                    .map(|(c, x)| {
                        let k = keys[c - base];
                        (k % self.p, self.index.mono(k / self.p).clone(), Rational::from_integer(x.clone()) / &lead)
                    })
                    .collect();
            }
            ech.insert_reduced(w);
        }
        Vec::new()
    }
}

/// An exact polynomial lift when one exists in low degree, else a degree-by-degree lift of `rhs = η∘f_b` modulo `m^cert`.
pub fn lift_branch(branch: &Branch, rhs_exact: &[Polynomial], cert: u32) -> std::result::Result<BranchLift, Obstruction> {
    if let Some(xi) = exact_polynomial_lift(branch, rhs_exact) {
        return Ok(BranchLift { label: branch.label().to_string(), xi, residual_order: None, exact: true });
    }
    let sys = BranchSystem::new(branch, cert, cert);
    let rhs = sys.rhs_map(rhs_exact, cert);
    let xi = match sys.solve(&rhs) {
        Ok(xi) => xi,
        Err(key) => {
            let degree = sys.equation_degree(key);
            return Err(Obstruction {
                branch: branch.label().to_string(),
                degree,
                functional: sys.obstruction(&rhs, degree),
            });
        }
    };
    let residual = residual_order(branch, &xi, rhs_exact);
    if residual.is_none() {
        return Ok(BranchLift { label: branch.label().to_string(), xi, residual_order: None, exact: true });
    }
    Ok(BranchLift { label: branch.label().to_string(), xi, residual_order: residual, exact: false })
}

fn residual_order(branch: &Branch, xi: &[Polynomial], rhs: &[Polynomial]) -> Option<u32> {
    branch.tf(xi).iter().zip(rhs).filter_map(|(l, r)| (l - r).order()).min()
}

/// Polynomial `ξ` with `df·ξ = rhs` exactly, searched with degree up to `deg rhs`.
fn exact_polynomial_lift(branch: &Branch, rhs: &[Polynomial]) -> Option<Vec<Polynomial>> {
    let d_rhs = rhs.iter().filter_map(Polynomial::degree).max().unwrap_or(0);
    let d_jac = branch.jacobian().iter().flatten().filter_map(Polynomial::degree).max().unwrap_or(0);
    let xi_bound = d_rhs + 1;
    let n = branch.n() as u64;
    let unknowns = crate::algebra::binomial(n + xi_bound as u64 - 1, n) * n;
    if unknowns as usize > EXACT_UNKNOWN_LIMIT {
        return None;
    }
    let eq_bound = xi_bound + d_jac + 1;
    let sys = BranchSystem::new(branch, xi_bound, eq_bound);
    let xi = sys.solve(&sys.rhs_map(rhs, eq_bound)).ok()?;
    residual_order(branch, &xi, rhs).is_none().then_some(xi)
}

/// Lifts `η` along every branch. Obstructions are returned, not raised.
pub fn solve_lift(f: &MultiGerm, eta: &VectorFieldGerm, cert: u32) -> Result<LiftOutcome> {
    if eta.p() != f.p() {
        return Err(Error::Arity(format!("field has {} components, germ has p = {}", eta.p(), f.p())));
    }
    let mut branches = Vec::new();
    for b in f.branches() {
        let rhs = eta.compose(b, None)?;
        match lift_branch(b, &rhs, cert) {
            Ok(bl) => branches.push(bl),
            Err(o) => return Ok(LiftOutcome::Obstructed(o)),
        }
    }
    Ok(LiftOutcome::Lifted(LiftCertificate { eta: eta.clone(), branches, cert }))
}

/// `solve_lift` for a field only known modulo `m^cert`: compositions are truncated.
pub fn solve_lift_truncated(f: &MultiGerm, eta: &VectorFieldGerm, cert: u32) -> Result<LiftOutcome> {
    let t = JetTruncation::new(cert);
    let mut branches = Vec::new();
    for b in f.branches() {
        let rhs = eta.compose(b, Some(t))?;
        let sys = BranchSystem::new(b, cert, cert);
        let map = sys.rhs_map(&rhs, cert);
        match sys.solve(&map) {
            Ok(xi) => branches.push(BranchLift {
                label: b.label().to_string(),
                residual_order: Some(cert),
                xi,
                exact: false,
            }),
            Err(key) => {
                let degree = sys.equation_degree(key);
                return Ok(LiftOutcome::Obstructed(Obstruction {
                    branch: b.label().to_string(),
                    degree,
                    functional: sys.obstruction(&map, degree),
                }));
            }
        }
    }
    Ok(LiftOutcome::Lifted(LiftCertificate { eta: eta.clone(), branches, cert }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn euler_field_of_the_cusp() {
        let y = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![y.pow(2), y.pow(3)]]).unwrap();
        let eta = VectorFieldGerm::new(vec![v(2, 0).scale(&int(2)), v(2, 1).scale(&int(3))]).unwrap();
        let c = solve_lift(&f, &eta, 8).unwrap().into_result().unwrap();
        assert!(c.exact());
        assert_eq!(c.branches[0].xi, vec![y]);
        assert!(c.recheck(&f).unwrap());
    }

    #[test]
    fn multistable_coordinate_field() {
        let (x, y) = (v(2, 0), v(2, 1));
        let f = MultiGerm::from_components(vec![vec![x.clone(), y.pow(2)], vec![x.pow(2), y]]).unwrap();
        let eta = VectorFieldGerm::basis(2, 0, v(2, 0));
        let c = solve_lift(&f, &eta, 8).unwrap().into_result().unwrap();
        assert!(c.exact());
        assert_eq!(c.branches[0].xi, vec![x.clone(), Polynomial::zero(2)]);
        assert_eq!(c.branches[1].xi, vec![x.scale(&crate::algebra::rat(1, 2)), Polynomial::zero(2)]);
    }

    #[test]
    fn constant_field_is_obstructed() {
        let y = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![y.pow(2), Polynomial::zero(1)]]).unwrap();
        let eta = VectorFieldGerm::basis(2, 0, Polynomial::one(2));
        match solve_lift(&f, &eta, 8).unwrap() {
            LiftOutcome::Obstructed(o) => {
                assert_eq!(o.degree, 0);
                assert_eq!(o.functional.len(), 1);
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn power_series_lift_is_certified_not_exact() {
        // f(x) = x + x², η = ∂X: ξ = 1/(1+2x) is not a polynomial.
        let x = v(1, 0);
        let f = MultiGerm::from_components(vec![vec![&x + &x.pow(2)]]).unwrap();
        let eta = VectorFieldGerm::basis(1, 0, Polynomial::one(1));
        let c = solve_lift(&f, &eta, 10).unwrap().into_result().unwrap();
        assert!(!c.exact());
        assert!(c.branches[0].residual_order.unwrap() >= 10);
        assert!(c.recheck(&f).unwrap());
    }
}
