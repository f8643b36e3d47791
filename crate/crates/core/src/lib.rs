//! Computational convex geometry around John's ellipsoid theorem: maximal
//! inscribed ellipsoids, John and Lewis positions, identity decompositions,
//! exact and Monte Carlo measures, and numerical checks of the volume-ratio
//! and reverse isoperimetric bounds in low dimension.

// `!(x > 0.0)` is used on purpose so NaN is rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod brascamp_lieb;
pub mod error;
pub mod geometry;
pub mod john;
pub mod linalg;
pub mod lp;
pub mod lp_spaces;
pub mod measures;
pub mod random;
mod serde_vectors;

pub use error::{Error, Result};
pub use geometry::{AffineMap, Body, BodyOracle, Ellipsoid, HPolytope, PolytopeFile, VPolytope};
pub use measures::{Estimate, McParams};
