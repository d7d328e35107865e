//! Matrix models of the reduced Kodaira-Spencer-Mather maps, the levels where they become
//! surjective or stop being injective, and the resulting generator counts.

pub mod model;
pub mod report;

pub use model::{stable_order, truncation_order, KSLevel, KSMapModel};
pub use report::{
    classify_stable, locate_i1_i2, min_generators, GeneratorCount, KSReport, KsAnalyzer, KsOptions, LevelBound, Stability,
};
