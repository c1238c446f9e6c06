//! Conic set arithmetic over finite-dimensional normed spaces.
//!
//! The crate provides a V-representation set algebra (convex hulls plus conic
//! rays plus norm balls, and finite unions thereof), polyhedral ordering
//! cones with primal/dual descriptions, excess and Hausdorff distances,
//! Gerstewitz scalarization, verifiers and randomized falsifiers for conic
//! cancellation laws, and numeric checks for set-valued subdifferentials,
//! sharp minimality, and stability bounds.

pub mod cancellation;
pub mod cones;
pub mod error;
pub mod excess;
pub mod norm;
pub mod numerics;
pub mod sample;
pub mod scalarization;
pub mod setmaps;
pub mod setopt;
pub mod sets;

pub use cones::PolyhedralCone;
pub use error::{Error, Result};
pub use norm::NormId;
pub use numerics::Tolerance;
pub use sets::{GenSet, UnionSet};
