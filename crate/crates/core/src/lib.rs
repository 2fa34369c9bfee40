//! Drug–target binding-affinity regression with a three-stream residual
//! 1D-CNN over label-encoded SMILES and protein sequences.
//!
//! Module map:
//!
//! * [`vocab`]: character vocabularies and fixed-length encoding
//! * [`dataset`]: KIBA loading, score transform, flattening, folds
//! * [`model`]: the network, its parameters and checkpoints
//! * [`training`]: RMSE loss, Adam schedule, warm restarts, accumulation
//! * [`metrics`]: CI, MSE, r², r₀², r_m² and fold aggregation
//! * [`report`]: prediction tables, regression line and scatter output
//! * [`pipeline`]: the `prepare` / `train` / `evaluate` / `predict` /
//!   `report` commands behind the `resdta` binary
//! * [`synthetic`]: toy datasets with a planted signal
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod synthetic;
pub mod training;
pub mod vocab;

pub use error::{Error, Result};

/// SplitMix64 finalizer over two words; used to derive independent RNG
/// seeds for epochs and samples.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
