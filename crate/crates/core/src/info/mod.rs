//! Discretization of band data and discrete information measures.
//!
//! All measures are computed over labeled pixels only, in bits.

mod coded;
mod measures;

pub use coded::{
    discretize_band, gt_codes, uniform_bins, BinStrategy, CodedVariable, DiscretizationConfig,
};
pub use measures::{
    entropy, interaction_info, joint_entropy, mi_joined, mutual_info, JointHistogram,
};
