//! Hyperspectral cubes, ground-truth maps and synthetic datasets.
//!
//! Bands are 0-based in memory and reported 1-based to users.

mod cube;
mod ground_truth;
mod synthetic;

pub use cube::{
    data_path_for, decode_payload, encode_payload, load_cube, write_cube, ByteOrder, CubeLayout,
    DataType, EnviHeader, HyperCube, Interleave,
};
pub use ground_truth::{
    load_ground_truth, parse_text_grid, render_grid, sidecar_path, write_ground_truth_text,
    GroundTruth,
};
pub use synthetic::{
    generate_synthetic, BandRole, SyntheticSpec, INFORMATIVE_STEP, NOISE_RANGE, SYNERGY_STEP,
};
