//! Monte Carlo experiment runner, law comparisons and model diagnostics.

pub mod diagnostics;
pub mod experiment;
pub mod stats;
