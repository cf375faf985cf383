//! Ellipsoid bounds, asymmetry measures and extremal convex bodies in small
//! dimensions, with numerical certificates for each inequality.

pub mod error;
pub mod linalg;
pub mod lp;
pub mod conic;
pub mod bodies;
pub mod ellipsoid;
pub mod constructions;
pub mod asymmetry;
pub mod optimize;
pub mod radii;
pub mod affine;
pub mod harness;
