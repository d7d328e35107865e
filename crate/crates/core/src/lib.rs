//! Exact computation of liftable vector fields for corank-one multigerms.
//!
//! Layers, bottom up: [`algebra`] (rational polynomials and jets), [`polymodule`]
//! (Gröbner bases, syzygies, jet linear algebra), [`germs`] (multigerms and their
//! K-invariants), [`ks_maps`] (the reduced Kodaira-Spencer-Mather maps), [`lift`]
//! (construction and certification of liftable fields) and [`document`] (the germ
//! description language and the built-in catalog).

pub mod algebra;
pub mod document;
pub mod error;
pub mod germs;
pub mod ks_maps;
pub mod lift;
pub mod polymodule;

pub use algebra::{Monomial, MonomialOrder, Polynomial, Rational};
pub use error::{Error, ErrorKind, Result};
