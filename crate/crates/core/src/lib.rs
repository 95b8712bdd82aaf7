//! Lattice protein folding as pseudo-Boolean optimization.
//!
//! Four encodings of a chain on the cubic or diamond lattice are built as
//! HUBO/QUBO objectives, reduced to quadratic form, minimized with simulated
//! annealing, parallel tempering or exact search, and decoded back into folds.

pub mod analysis;
pub mod embedding;
pub mod encoders;
pub mod error;
pub mod io;
pub mod lattice;
pub mod objective;
pub mod pipeline;
pub mod reduction;
pub mod solvers;

pub use error::{Error, Result};
