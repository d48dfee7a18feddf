//! Library behind the `fika` CLI: call-graph reachability from public entry
//! points to third-party-library call sites, coverage evidence, scenario
//! generation and vulnerability rule triage over a portable code model.

pub mod cli;
pub mod context;
pub mod coverage;
pub mod graph;
pub mod model;
pub mod report;
pub mod scenario;
pub mod triage;
