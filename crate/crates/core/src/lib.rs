//! Proper q-colorings of finite windows of the lattice `Z^d`: frozen
//! configurations, list coloring through kernel-perfect orientations,
//! boundary extension, mixing witnesses, exact counting and sampling.

pub mod census;
pub mod csp;
pub mod error;
pub mod fill;
pub mod frozen;
pub mod lattice;
pub mod listcolor;
pub mod mixing;
pub mod rule;

pub use error::{Error, Result};
pub use lattice::{BoxRegion, Coord, PartialColoring, ProperColoring};
pub use rule::{ColoringRule, LiftedColoringRule, LinearColoringRule};
