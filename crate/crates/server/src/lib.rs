//! HTTP service and command line for the `dialogkg` graph.

pub mod api;
pub mod cli;
