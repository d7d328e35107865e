//! Multigerms, their local algebras and K-invariants.

pub mod field;
pub mod germ;
pub mod invariants;
pub mod local;
pub mod reduce;
pub mod unfolding;

pub use field::VectorFieldGerm;
pub use germ::{Branch, MultiGerm};
pub use invariants::{delta, higher_invariants, GermAlgebra, GermInvariants, HigherInvariants, InvariantMode};
pub use local::{BranchAlgebra, MonomialIndex};
pub use reduce::{reduce_to_core, ReducedGerm, ReductionSummary};
pub use unfolding::{build_unfolding, squaring_map, UnfoldingMode, UnfoldingSpec};
