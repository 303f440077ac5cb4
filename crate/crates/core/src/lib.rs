//! Skorokhod embeddings of atomic laws by the Chacon-Walsh tangent method,
//! with minimality diagnostics and exact-exit simulation.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balayage;
pub mod cli;
pub mod construct;
pub mod error;
pub mod measure;
pub mod minimality;
pub mod potential;
pub mod simulate;

/// Absolute tolerance on potential levels and positions.
pub const TAU: f64 = 1e-9;
/// Tolerance on total mass.
pub const TAU_MASS: f64 = 1e-12;

pub use balayage::{balayage, Interval, Side};
pub use construct::{EmbeddingPlan, Step, Tangent};
pub use error::{Error, Result};
pub use measure::{Atom, AtomicMeasure};
pub use minimality::{MinimalityReport, RegionA};
pub use potential::PLConcave;
pub use simulate::{EmpiricalLaw, PathSample};
