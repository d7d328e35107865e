//! Module-level machinery: free-module elements, Gröbner bases and syzygies, and
//! exact linear algebra on jet spaces.

pub mod groebner;
pub mod jet;
pub mod module;
pub mod sparse;

pub use groebner::{groebner_basis, ideal_basis, syzygy_basis, GroebnerBasis, ModuleOrder};
pub use jet::{jet_span, JetAmbient, JetSubspace, JetSubspaceData};
pub use module::FreeModuleElement;
pub use sparse::{Echelon, LinearSystem};
