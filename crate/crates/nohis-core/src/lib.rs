//! Non-overlapping hierarchical vector index (NOHIS-tree) core.
//!
//! This crate implements an exact nearest-neighbor index for dense real
//! vectors. The database is bisected recursively along its leading principal
//! component (PDDP clustering); at every split the coordinates of both
//! sub-clusters are re-expressed through an orthogonal reflection that maps
//! the first canonical axis onto the split direction, so the two sibling
//! bounding rectangles never overlap. Queries descend the tree with MINDIST
//! pruning and a running lower bound, and return exactly the same neighbors
//! a sequential scan would.
//!
//! Modules:
//!
//! * [`linalg`] — vector sets, centroid/scatter statistics, leading principal
//!   component, and the reflection operator.
//! * [`pddp`] — principal-direction divisive partitioning of a vector set
//!   into a binary cluster hierarchy.
//! * [`tree`] — NOHIS-tree construction (reflected, non-overlapping MBRs) and
//!   the axis-aligned overlapping baseline built from the same splits.
//! * [`search`] — exact k-NN and range search with visit statistics, plus the
//!   brute-force scan oracle.
//! * [`descriptors`] — multi-scale Harris interest points and 12-dimensional
//!   Zernike moment descriptors over grayscale rasters.
//! * [`retrieval`] — per-descriptor k-NN aggregation into an image ranking.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature and enable `libm` for float math in freestanding builds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("nohis-core requires either the `std` or the `libm` feature");

mod error;
pub(crate) mod math;

pub mod descriptors;
pub mod linalg;
pub mod pddp;
pub mod retrieval;
pub mod search;
pub mod tree;

pub use error::{Error, Result};
pub use linalg::{Reflection, VectorSet};
pub use search::{Neighbor, NeighborList, SearchStats};
pub use tree::{Mbr, NohisTree, TreeStyle};
