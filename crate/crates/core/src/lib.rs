//! Decision procedures and certificates around the Garden of Eden theorem:
//! cellular automata on subshifts, strong irreducibility and specification,
//! topological entropy, and homoclinic points of principal algebraic actions.

pub mod ca;
pub mod capacity;
pub mod corpus;
pub mod entropy;
pub mod error;
pub mod lattice;
pub mod poly;
pub mod principal;
pub mod specification;
pub mod subshift;

pub use error::{EdenError, Result};
pub use lattice::{Cell, Configuration, Pattern, Symbol, Window};
pub use subshift::{equal_language, Alphabet, LabeledEdge, LabeledGraph, ShiftKind, Subshift};
