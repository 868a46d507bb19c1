//! Model selection for growing networks.
//!
//! Synthetic dynamic networks are generated from nine collapsed
//! continuous-time branching-process models that combine fitness, lognormal
//! aging and affine preferential attachment. Each network is summarized by a
//! dynamic feature matrix (normalized degree increments per arrival cohort
//! and final-degree group) and by 36 static snapshot features, and a
//! histogram gradient-boosted tree classifier learns to tell the mechanisms
//! apart. The same features computed on a real timestamped network give a
//! probability distribution over the nine mechanisms.
//!
//! Runnable examples live in `examples/`; the `ctbp-select` binary exposes
//! the batch pipeline.

pub mod dynamic;
pub mod engine;
pub mod error;
pub mod gbdt;
pub mod model;
pub mod pipeline;
pub mod seed;
pub mod static_features;
pub mod stats;

pub use error::{Error, Result};
pub use model::{ModelClass, ModelConfig};
