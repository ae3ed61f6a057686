//! Information-theoretic band selection for hyperspectral images.
//!
//! Two greedy filters pick spectral bands against a ground-truth class map:
//! a mutual-information filter with a redundancy threshold and an
//! interaction-information (three-variable MI) filter. The crate also loads
//! ENVI cubes, generates synthetic datasets, and evaluates band subsets with
//! a k-NN classifier.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod info;
pub mod kv;
pub mod selection;

pub use data::{GroundTruth, HyperCube};
pub use error::{Error, Result};
pub use info::{CodedVariable, DiscretizationConfig};
pub use selection::{Algorithm, SelectionConfig, SelectionResult};
