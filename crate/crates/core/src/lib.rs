//! Construction, validation and transformation of string representations:
//! families of piecewise-linear curves whose pairwise crossing counts are
//! prescribed exactly.

// Errors carry exact points and are only built on failure paths.
#![allow(clippy::result_large_err)]

pub mod exec;
pub mod geometry;
pub mod representation;
pub mod surgery;
pub mod gadgets;
pub mod extension;
pub mod noodleforce;
pub mod analysis;
