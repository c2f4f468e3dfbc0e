//! Shadow-slope fields over random landscapes.
//!
//! A height function on a rectangular window of the square lattice is sampled
//! i.i.d. from a chosen law. A sun sits at infinity in the +column direction
//! and emits parallel rays of slope `level`; a site is *lit* when no site to
//! its east pokes above the ray, which happens exactly when its shadow slope
//! (the largest eastward height-difference slope) is at most `level`.
//!
//! The crate computes that slope field, studies connectivity of its sublevel
//! and superlevel sets (cluster labeling, box crossings, level scans with
//! common random numbers), evaluates the closed-form probabilities and
//! Peierls-style bounds that govern the two percolation regimes, and rebuilds
//! the height field from the slope field up to an additive constant.
//!
//! Everything here is `no_std + alloc`; IO, file formats and the CLI live in
//! the companion `shadowperc` crate.
//!
//! ```
//! use shadowperc_core::alpha::compute_alpha;
//! use shadowperc_core::clusters::{has_crossing, label_clusters, Adjacency, Axis};
//! use shadowperc_core::{DistributionSpec, HeightField, Side};
//!
//! let law = DistributionSpec::gaussian(0.0, 1.0).unwrap();
//! let field = HeightField::generate(64, 64, 64, law, 7).unwrap();
//! let alpha = compute_alpha(&field);
//! let lit = alpha.level_set(0.9, Side::Le);
//! let clusters = label_clusters(&lit, Adjacency::Orthogonal);
//! println!(
//!     "lit cells: {}, clusters: {}, spanning: {}",
//!     lit.count_set(),
//!     clusters.cluster_count(),
//!     has_crossing(&clusters, Axis::Horizontal),
//! );
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alpha;
pub mod analysis;
pub mod clusters;
pub mod dist;
pub mod field;
pub mod oracles;
pub mod reconstruct;
pub mod rng;

pub use alpha::{AlphaField, LevelSetMask, Side};
pub use clusters::{Adjacency, Axis, ClusterLabeling, CrossingEstimate};
pub use dist::DistributionSpec;
pub use field::HeightField;
pub use reconstruct::{MeanMode, ReconstructionResult, RowStatus};
