//! Construction and certification of liftable vector fields.

pub mod complete;
pub mod image;
pub mod module;
pub mod solve;
pub mod transport;
pub mod unfold;

pub use complete::{complete_generators, count_order, Completion, CompletionConfig, CompletionStep, Strategy};
pub use image::{image_equation, lift_from_image, tangent_fields, ImageRoute};
pub use module::{
    compare_modules, minimize, nakayama_count, verify_generating_set, LiftModule, LiftModuleSummary, ModuleComparison, ModuleJet,
    GeneratorSummary, InclusionFailure, Provenance, VerifyReport,
};
pub use solve::{solve_lift, solve_lift_truncated, BranchLift, LiftCertificate, LiftOutcome, Obstruction};
pub use transport::{transport, DiffeoPair};
pub use unfold::{lift_of_squaring_map, restrict_from_unfolding, Restriction};
