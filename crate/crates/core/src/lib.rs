//! Sparse domination for fractional operators on dyadic grids.
//!
//! The crate discretizes a rectangular domain into `2^{Jn}` cells and builds,
//! on top of it, dyadic lattices, weight characteristics, semigroup-based
//! fractional powers, maximal operators, the constructive sparse domination
//! algorithm, closed-form bound calculators and an experiment harness.

pub mod bounds;
pub mod error;
pub mod grid;
pub mod harness;
pub mod maximal;
pub mod operators;
pub mod rng;
pub mod sparse;
pub mod util;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Cube, DyadicLattice, GridDomain, GridFunction, Lattice};
pub use weights::Weight;
