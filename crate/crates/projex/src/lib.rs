//! Finite-scale laboratory for orthogonal projections of planar fractal sets.
//!
//! The crate builds explicit nested generations of balls and squares,
//! measures covering and packing numbers of their projections, and verifies
//! finite combinatorial statements about projection cardinalities, tube
//! energies and incidences in exact arithmetic.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod covering;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod incidence;

pub use error::{Error, Result};
