//! Exact multivariate polynomials over the rationals and their jets.

pub mod monomial;
pub mod polynomial;
pub mod rational;

pub use monomial::{monomials_below, monomials_of_degree, Monomial, MonomialOrder};
pub use polynomial::{default_names, JetTruncation, Polynomial};
pub use rational::{binomial, format_rational, int, parse_rational, rat, Rational};
