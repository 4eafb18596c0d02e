//! File formats, the HTTP chat oracle, batch running and the command line
//! for the `sense-bridge-core` pipeline.

pub mod cli;
pub mod formats;
pub mod http;
pub mod report;
pub mod runner;

pub use sense_bridge_core as core;
