//! Symmetric periodic orbits of reversible planar maps.
//!
//! The crate builds reversible maps, computes fixed-point indices by
//! variation of angle, generates the symmetry lines `Fix(f^m ∘ I)` by
//! pushforward, and turns their intersections into certified symmetric
//! periodic orbits.

pub mod domains;
pub mod expr;
pub mod families;
pub mod harness;
pub mod revmaps;
pub mod symmlines;
pub mod winding;

pub use domains::{InvariantDomain, LocusSegment, Point};
pub use revmaps::{InvolutionSpec, MapFlags, MapSpec, ValidationReport};
