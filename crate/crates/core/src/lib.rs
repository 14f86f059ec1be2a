//! Capacity planning for packet networks under shortest-path routing.
//!
//! The pipeline: build or load a [`graph::Topology`], derive per-pair shortest-path
//! traversal fractions with [`routing::build_routing_table`], assemble exact per-edge
//! load distributions with [`pmf::edge_load_pmf`], convert them into minimal link
//! capacities with [`allocation::allocate`], and validate the plan against the
//! stochastic frame model with [`simulator::run_simulation`]. [`metrics`] adds the
//! global performance measure, its expectation over traffic parameters, and the
//! edge-removal topology sweep.

pub mod allocation;
mod error;
pub mod graph;
pub mod metrics;
pub mod pmf;
pub mod routing;
pub mod seeds;
pub mod simulator;

pub use error::{Error, Result};
