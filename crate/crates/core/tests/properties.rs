//! Structural properties checked on randomly generated corank-one germs.

use liftable_core::document::GermDocument;
use liftable_core::germs::{GermAlgebra, InvariantMode, MultiGerm};
use liftable_core::ks_maps::{KsAnalyzer, KsOptions, LevelBound};
use liftable_core::lift::{compare_modules, complete_generators, lift_from_image, transport, CompletionConfig, DiffeoPair};
use liftable_core::{Polynomial, Rational};
use proptest::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn t() -> Polynomial {
    Polynomial::var(1, 0)
}

/// `t ↦ (t^j, t^k + d·t^(k+1))` with `j < k`, plus optionally the transverse line `t ↦ (0, t)`.
///
/// Image equations stay sparse for this family; dense ones make the global syzygy step slow.
fn plane_curve() -> impl Strategy<Value = MultiGerm> {
    (1u32..4, 1u32..4, -2i64..3, any::<bool>()).prop_map(|(j, gap, d, line)| {
        let k = j + gap;
        let mut branches = vec![vec![t().pow(j), &t().pow(k) + &t().pow(k + 1).scale(&q(d))]];
        if line {
            branches.push(vec![Polynomial::zero(1), t()]);
        }
        MultiGerm::from_components(branches).unwrap()
    })
}

/// `(x, y^k + c·x·y + e·y^(k+1))` from the plane to the plane.
fn plane_map() -> impl Strategy<Value = MultiGerm> {
    (2u32..5, -2i64..3, -1i64..2).prop_map(|(k, c, e)| {
        let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let second = &(&y.pow(k) + &(&x * &y).scale(&q(c))) + &y.pow(k + 1).scale(&q(e));
        MultiGerm::from_components(vec![vec![x, second]]).unwrap()
    })
}

fn any_germ() -> impl Strategy<Value = MultiGerm> {
    prop_oneof![plane_curve(), plane_map()]
}

fn opts() -> KsOptions {
    KsOptions { max_i: 4, ..KsOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn levels_are_monotone_and_ordered(f in any_germ()) {
        let r = KsAnalyzer::new(&f, opts()).and_then(|mut a| a.locate_i1_i2());
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        let lv = &r.levels;
        for i in 0..lv.len() {
            for j in i + 1..lv.len() {
                prop_assert!(!lv[i].surjective || lv[j].surjective);
                prop_assert!(!lv[j].injective || lv[i].injective);
            }
        }
        if let (LevelBound::Finite(a), LevelBound::Finite(b)) = (r.i1, r.i2) {
            prop_assert!(a >= b);
        }
        if let Some(i) = r.balanced_level() {
            for (j, l) in lv.iter().enumerate() {
                prop_assert_eq!((l.surjective, l.injective), (j >= i, j <= i));
            }
        }
    }

    #[test]
    fn level_invariants_follow_the_closed_forms(f in any_germ()) {
        let alg = GermAlgebra::new(&f, 32);
        prop_assume!(alg.is_ok());
        let mut alg = alg.unwrap();
        for i in 0..3 {
            prop_assert_eq!(alg.formula_delta(i), alg.level_delta(i));
            prop_assert_eq!(alg.formula_gamma(i), alg.level_gamma(i).unwrap());
        }
        let parts: usize = f
            .branches()
            .iter()
            .map(|b| GermAlgebra::new(&MultiGerm::new(f.target_vars().to_vec(), vec![b.clone()]).unwrap(), 32).unwrap().delta())
            .sum();
        prop_assert_eq!(parts, alg.delta());
    }

    #[test]
    fn kernel_formula_matches_elimination(f in any_germ()) {
        let a = KsAnalyzer::new(&f, opts());
        prop_assume!(a.is_ok());
        let mut a = a.unwrap();
        for i in 0..3 {
            if a.model(i + 1).unwrap().is_surjective() {
                let brute = a.model(i + 1).unwrap().kernel_dim() as i64;
                prop_assert_eq!(a.kernel_formula(i, InvariantMode::Formula).unwrap(), brute);
            }
        }
    }

    /// The image route and the kernel completion are independent; where both apply they agree.
    #[test]
    fn image_route_agrees_with_completion(f in plane_curve()) {
        let image = lift_from_image(&f, 20);
        prop_assume!(image.is_ok());
        let image = image.unwrap();
        prop_assert!(image.module.reverify(&f).unwrap().iter().all(|v| *v));
        let equation_vanishes = f
            .branches()
            .iter()
            .all(|b| image.equation.substitute(b.components(), None).unwrap().is_zero());
        prop_assert!(equation_vanishes);
        if let Ok(c) = complete_generators(&f, CompletionConfig { ks: opts(), ..CompletionConfig::default() }) {
            prop_assert_eq!(c.module.len(), image.module.len());
            let order = c.module.reliable_target_order(&f).min(10);
            let cmp = compare_modules(&c.module.generators, &image.module.generators, order, f.target_vars()).unwrap();
            prop_assert!(cmp.equal(), "{:?}", cmp);
        }
    }

    #[test]
    fn shear_transport_round_trips(f in plane_curve(), c in -2i64..3, k in 1u32..3) {
        let image = lift_from_image(&f, 20);
        prop_assume!(image.is_ok());
        let module = image.unwrap().module;
        let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let shift = y.pow(k + 1).scale(&q(c));
        let there = DiffeoPair::new(vec![&x + &shift, y.clone()], vec![&x - &shift, y.clone()], 20).unwrap();
        let back = DiffeoPair::new(vec![&x - &shift, y.clone()], vec![&x + &shift, y], 20).unwrap();
        let (g, moved) = transport(&module, &f, &there, None).unwrap();
        let (h, returned) = transport(&moved, &g, &back, None).unwrap();
        prop_assert_eq!(h.branches()[0].components(), f.branches()[0].components());
        let cmp = compare_modules(&returned.generators, &module.generators, 10, f.target_vars()).unwrap();
        prop_assert!(cmp.equal());
    }

    #[test]
    fn documents_round_trip(f in any_germ()) {
        let mut text = format!("germ random {{ n = {}; p = {};", f.n(), f.p());
        for b in f.branches() {
            let comps: Vec<String> = b.components().iter().map(|c| c.render(b.source_vars())).collect();
            text.push_str(&format!(" branch {}({}) = ({});", b.label(), b.source_vars().join(", "), comps.join(", ")));
        }
        text.push_str(" }");
        let d = GermDocument::parse(&text).unwrap();
        prop_assert_eq!(&d.germ, &f);
        prop_assert_eq!(GermDocument::parse(&d.render()).unwrap(), d);
    }
}
