//! Exact computations with crystallographic tilings of Euclidean space.
//!
//! Points, isometries and polytopes are stored with rational coordinates in a
//! frame given by a positive definite Gram matrix, so that group membership,
//! tile equality and face-to-face checks are exact. Floating point only
//! enters the metric on isometries.

pub mod construction;
pub mod error;
pub mod group;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod polytope;
pub mod presets;
pub mod rational;
pub mod svg;
pub mod tiling;
pub mod voronoi;

pub use error::{Error, Result};
pub use group::{CrystalGroup, RawGroup, SeitzOp};
pub use isometry::{Frame, Isometry};
pub use polytope::ConvexPolytope;
pub use rational::{Point, QMatrix, QVector, Rational};
pub use tiling::PeriodicTiling;
