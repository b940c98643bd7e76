//! Certificates, greedy solvers and worst-case constructions for sparse
//! recovery with a partially known support.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, and the `*32`
//! aliases to `f32`.

pub mod bank;
pub mod conditions;
pub mod dictionary;
pub mod error;
pub mod greedy;
pub mod linalg;
pub mod relax;
pub mod repro;
pub mod scalar;
pub mod subsets;
pub mod sweep;

pub use conditions::{Bound, ConditionReport, Relation};
pub use dictionary::{Construction, Metadata, SupportSet, Variant};
pub use error::{Error, Result};
pub use greedy::{TiePolicy, Termination};
pub use linalg::Spark;
pub use relax::MinimizerStatus;
pub use scalar::Scalar;

pub type Matrix = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type Tolerances = linalg::Tolerances<f64>;
pub type Tolerances32 = linalg::Tolerances<f32>;
pub type Dictionary = dictionary::Dictionary<f64>;
pub type Dictionary32 = dictionary::Dictionary<f32>;
pub type GreedyConfig = greedy::GreedyConfig<f64>;
pub type GreedyConfig32 = greedy::GreedyConfig<f32>;
pub type GreedyTrace = greedy::GreedyTrace<f64>;
pub type GreedyTrace32 = greedy::GreedyTrace<f32>;
pub type SparseVector = relax::SparseVector<f64>;
pub type SparseVector32 = relax::SparseVector<f32>;
pub type MinimizerVerdict = relax::MinimizerVerdict<f64>;
pub type MinimizerVerdict32 = relax::MinimizerVerdict<f32>;
