//! Hankel and circuit matrices of graph properties over GF(2), and the
//! finite tree automata they induce over inductively defined graph classes.

pub mod circuit;
pub mod compiler;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod hankel;
pub mod properties;

pub use error::{Error, ParseError, Result};
pub use graph::{CanonicalForm, ColoredGraph, GraphError};
