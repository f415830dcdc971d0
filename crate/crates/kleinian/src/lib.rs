//! Construction and verification of Kleinian groups assembled from Fuchsian
//! building blocks by Klein-Maskit combination.
//!
//! The library builds exact Fuchsian models of surface-times-interval pieces
//! with a normalized boundary parabolic, stacks them into amalgamated free
//! products over horizontal strips, adjoins a shuffling parabolic as an HNN
//! letter whose translation length comes from Chinese-remainder arithmetic,
//! and machine-checks every geometric hypothesis the combination theorems
//! rest on: precise invariance of half-planes, strip confinement of sampled
//! limit sets, spacing and width inequalities, and ping-pong normal forms.

pub mod cli;
pub mod combine;
pub mod deform;
pub mod error;
pub mod fuchsian;
pub mod invariance;
pub mod limitset;
pub mod marked;
pub mod moebius;
pub mod perm;
pub mod region;
pub mod scalar;
pub mod shuffle;

pub use error::{Error, Result};
pub use moebius::{ExtComplex, MapClass, MoebiusMap};
pub use region::{halfplane_image, region_disjoint, region_image, Region};
pub use scalar::{Mode, Scalar, TOL_CLASS, TOL_DET};
