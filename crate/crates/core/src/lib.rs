//! Joint bike relocation and tricycle routing for dockless bike sharing.
//!
//! The pipeline runs from trip records to a space-time network, to a
//! mixed-integer program, to its solution and the metrics derived from it:
//!
//! - [`instance::ingest`] aggregates trip CSVs onto a grid of cells.
//! - [`timespace::build_network`] builds the time-expanded network.
//! - [`milp::formulate`] assembles the program; [`solver::solve_milp`]
//!   solves it with branch-and-bound over a bounded simplex.
//! - [`oracle`] holds an exhaustive reference solver and an independent
//!   feasibility checker; [`metrics`] and [`sweep`] turn solutions into
//!   scenario tables.
// `!(x > 0.0)` is how inputs reject NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagram;
pub mod error;
pub mod flows;
pub mod instance;
pub mod metrics;
pub mod milp;
pub mod oracle;
pub mod pipeline;
pub mod solver;
pub mod sweep;
pub mod timespace;

pub use error::{Error, Result};
