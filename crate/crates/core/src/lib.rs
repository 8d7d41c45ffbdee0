//! Computable geometric measure theory on simplicial integral currents.

pub mod cli;
pub mod config;
pub mod current;
pub mod decompose;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod flat;
pub mod goodcuts;
pub mod john;
pub mod poincare;

pub use current::{Cell, SimplicialCurrent, VertexSet};
pub use error::{Error, Result};
