//! Critical random graphs: configuration models, percolation, explorations and their scaling limits.

pub mod coalescent;
pub mod components;
pub mod degrees;
pub mod error;
pub mod exploration;
pub mod graph;
pub mod harness;
pub mod io;
pub mod limit_graph;
pub mod limits;
pub mod percolation;
pub mod quadrature;
pub mod seeds;

pub use error::{Error, Result};
pub use seeds::SimRng;
