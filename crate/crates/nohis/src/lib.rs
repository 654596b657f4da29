//! IO companion for the NOHIS-tree index: binary file formats, image
//! ingestion, seeded synthetic data, and the benchmark harness. The `nohis`
//! binary wires these into a command-line surface.

pub mod bench;
pub mod format;
pub mod imageio;
pub mod synth;

pub use nohis_core::{self as core};
