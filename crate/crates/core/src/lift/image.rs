//! Liftable fields of plane-curve multigerms through the equation of the image.
//!
//! A liftable field is tangent to the image `h = 0`, so `Lift(f) ⊆ Derlog(h)`. The fields
//! tangent to `h` are the first two entries of the syzygies of `(∂h/∂X, ∂h/∂Y, h)`. When every
//! minimal generator of `Derlog(h)` lifts, the two modules coincide.
//!
//! Each branch equation is a Sylvester resultant `Res_t(f₁(t) − X, f₂(t) − Y)`, which is a
//! power of the reduced equation; `Derlog` is unchanged by such powers.
//!
//! The syzygy step is global, so its cost grows quickly with the number of terms of `h`.

use num_traits::Zero;

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::germs::{Branch, MultiGerm, VectorFieldGerm};
use crate::lift::complete::count_order;
use crate::lift::module::{minimize, LiftModule, Provenance};
use crate::polymodule::syzygy_basis;

/// Coefficients of a univariate polynomial, lowest degree first.
fn univariate_coeffs(c: &Polynomial) -> Vec<Rational> {
    let d = c.degree().unwrap_or(0) as usize;
    let mut out = vec![Rational::zero(); d + 1];
    for (m, x) in c.terms() {
        out[m.degree() as usize] = x.clone();
    }
    out
}

/// Fraction-free determinant over `ℚ[X, Y]`; every Bareiss division is exact.
fn determinant(mut a: Vec<Vec<Polynomial>>, nvars: usize) -> Result<Polynomial> {
    let n = a.len();
    let mut prev = Polynomial::one(nvars);
    let mut sign = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(Polynomial::zero(nvars));
        };
        if piv != k {
            a.swap(piv, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).ok_or_else(|| Error::Consistency("inexact Bareiss step".into()))?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign { -d } else { d })
}

/// `Res_t(f₁(t) − X, f₂(t) − Y)` for a curve branch, a power of its image equation.
pub fn branch_equation(b: &Branch) -> Result<Polynomial> {
    if b.n() != 1 || b.p() != 2 {
        return Err(Error::Hypothesis("image equations need branches from a line to the plane".into()));
    }
    let shifted: Vec<Vec<Polynomial>> = b
        .components()
        .iter()
        .enumerate()
        .map(|(q, c)| {
            univariate_coeffs(c)
                .into_iter()
                .enumerate()
                .map(|(k, x)| {
                    let mut p = Polynomial::constant(2, x);
                    if k == 0 {
                        p = &p - &Polynomial::var(2, q);
                    }
                    p
                })
                .collect()
        })
        .collect();
    let (da, db) = (shifted[0].len() - 1, shifted[1].len() - 1);
    if da + db == 0 {
        return Err(Error::Hypothesis(format!("branch {} is not finite", b.label())));
    }
    let size = da + db;
    let mut m = vec![vec![Polynomial::zero(2); size]; size];
    // Rows `0..db` carry shifts of the first polynomial, the rest shifts of the second;
    // the highest power of t sits in the leftmost column.
    for (offset, rows, coeffs) in [(0, db, &shifted[0]), (db, da, &shifted[1])] {
        for r in 0..rows {
            for (k, c) in coeffs.iter().enumerate() {
                m[offset + r][r + coeffs.len() - 1 - k] = c.clone();
            }
        }
    }
    let h = determinant(m, 2)?;
    if h.is_zero() {
        return Err(Error::Hypothesis(format!("branch {} has no reduced image equation", b.label())));
    }
    Ok(h)
}

/// Product of the branch equations.
pub fn image_equation(f: &MultiGerm) -> Result<Polynomial> {
    f.branches().iter().try_fold(Polynomial::one(2), |acc, b| Ok(&acc * &branch_equation(b)?))
}

/// Polynomial generators of the fields tangent to `h = 0`.
pub fn tangent_fields(h: &Polynomial) -> Result<Vec<VectorFieldGerm>> {
    let syz = syzygy_basis(&[h.partial_derivative(0), h.partial_derivative(1), h.clone()])?;
    syz.into_iter()
        .map(|s| VectorFieldGerm::new(s[..2].to_vec()))
        .filter(|g| g.as_ref().map_or(true, |g| !g.is_zero()))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ImageRoute {
    pub equation: Polynomial,
    pub module: LiftModule,
}

/// `Lift(f)` for a plane-curve multigerm as the certified, minimised `Derlog` of its image.
pub fn lift_from_image(f: &MultiGerm, cert: u32) -> Result<ImageRoute> {
    let h = image_equation(f)?;
    let tangent = tangent_fields(&h)?;
    let order = count_order(&tangent, cert);
    let keep = minimize(2, order, &tangent);
    let gens: Vec<VectorFieldGerm> = keep.into_iter().map(|i| tangent[i].clone()).collect();
    let module = LiftModule::certify(f, gens, cert, Provenance::Image).map_err(|e| match e {
        Error::NotLiftable { branch, degree } => {
            Error::Hypothesis(format!("a field tangent to the image does not lift (branch {branch}, degree {degree})"))
        }
        e => e,
    })?;
    Ok(ImageRoute { equation: h, module })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;

    fn t() -> Polynomial {
        Polynomial::var(1, 0)
    }

    fn xy() -> (Polynomial, Polynomial) {
        (Polynomial::var(2, 0), Polynomial::var(2, 1))
    }

    fn is_multiple(a: &Polynomial, b: &Polynomial) -> bool {
        let q = a.div_exact(b);
        q.is_some_and(|q| q.degree() == Some(0))
    }

    #[test]
    fn cusp_equation() {
        let b = Branch::unnamed("a", vec![t().pow(2), t().pow(3)]).unwrap();
        let (x, y) = xy();
        assert!(is_multiple(&branch_equation(&b).unwrap(), &(&y.pow(2) - &x.pow(3))));
    }

    #[test]
    fn line_equation() {
        let b = Branch::unnamed("a", vec![t(), Polynomial::zero(1)]).unwrap();
        let (_, y) = xy();
        assert!(is_multiple(&branch_equation(&b).unwrap(), &y));
    }

    #[test]
    fn equation_vanishes_on_the_branch() {
        let b = Branch::unnamed("a", vec![t().pow(4), &t().pow(5) + &t().pow(7)]).unwrap();
        let h = branch_equation(&b).unwrap();
        assert!(h.substitute(b.components(), None).unwrap().is_zero());
        assert_eq!(h.degree(), Some(7));
    }

    #[test]
    fn cusp_lift_has_two_generators() {
        let f = MultiGerm::from_components(vec![vec![t().pow(2), t().pow(3)]]).unwrap();
        let r = lift_from_image(&f, 16).unwrap();
        assert_eq!(r.module.len(), 2);
        let (x, y) = xy();
        let euler = VectorFieldGerm::new(vec![x.scale(&int(2)), y.scale(&int(3))]).unwrap();
        let cmp = crate::lift::compare_modules(&r.module.generators, &[euler], 10, f.target_vars()).unwrap();
        assert!(cmp.reference_not_in_candidate.is_none());
    }
}
