//! Body representations (half-spaces, vertices, ellipsoids, oracles) and affine maps.

mod affine;
mod dd;
mod ellipsoid;
pub mod format;
mod oracle;
mod polytope;

pub use affine::AffineMap;
pub use ellipsoid::Ellipsoid;
pub use format::{Body, PolytopeFile, PolytopeKind};
pub use oracle::BodyOracle;
pub use polytope::{
    apply_affine, hrep_from_vrep, vrep_from_hrep, AffineImage, Facet, HPolytope, VPolytope, MAX_EXACT_DIM,
};

pub use crate::linalg::unit_ball_volume;
