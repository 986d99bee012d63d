//! Exact lattice-point counting, Ehrhart δ-vectors of rational lattice
//! polytopes, and δ-vectors of complete Gorenstein fans computed both by
//! enumeration and from a pulling triangulation with Box-point corrections.
//!
//! All arithmetic is over arbitrary-precision integers and rationals.

pub mod ehrhart;
pub mod error;
pub mod exactmath;
pub mod families;
pub mod fan;
pub mod io;
pub mod lattice;
pub mod polytope;
pub mod stringy;

mod dd;
mod enumerate;

pub use error::{Error, Result};
