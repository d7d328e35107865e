//! Fixtures shared by the benchmarks under `benches/`.

use liftable_core::document::catalog;
use liftable_core::germs::MultiGerm;
use liftable_core::Polynomial;

/// The germ of a built-in catalog entry; panics on an unknown name.
pub fn germ(name: &str) -> MultiGerm {
    catalog::load(name).unwrap_or_else(|e| panic!("catalog entry {name}: {e}")).germ
}

/// `(∂h/∂X, ∂h/∂Y, h)` for `h = Y^a − X^b`, the syzygy input of the image route.
pub fn derlog_input(a: u32, b: u32) -> Vec<Polynomial> {
    let (x, y) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
    let h = &y.pow(a) - &x.pow(b);
    vec![h.partial_derivative(0), h.partial_derivative(1), h]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(germ("cusp-pair").branch_count(), 2);
        assert_eq!(derlog_input(2, 3)[2].degree(), Some(3));
    }
}
