//! Exact structures on finite categories of quiver representations over
//! small prime fields: enumeration of isomorphism classes and conflation
//! orbits, relatively divisible and flat classes, cotorsion pairs, and
//! exhaustive checks of their structural laws.

pub mod cli;
pub mod cotorsion;
pub mod error;
pub mod exact;
pub mod ffmat;
pub mod galois;
pub mod laws;
pub mod relative;
pub mod repcat;
pub mod universe;

pub use error::{Error, Result};
