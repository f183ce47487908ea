//! Ordered matrices, twin-width certificates and the combinatorics around them.
//!
//! Indices in the library API are 0-based. Text formats and the CLI use 1-based
//! indices, and the `io` module converts between the two.

pub mod approx;
pub mod contraction;
pub mod divisions;
pub mod error;
pub mod folog;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod patterns;
pub mod structure;

pub use error::{Error, Result};
pub use graph::OrderedGraph;
pub use matrix::{Alphabet, OrderedMatrix, Placement};
pub use structure::{AtomicType, OrderType, OrderedBinaryStructure};
