//! Files, configuration and orchestration around [`cga_core`]: price and sector
//! CSV ingest, bank persistence, the agent roster, the full pipeline and its reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod bankio;
pub mod config;
mod error;
pub mod pipeline;
pub mod prices;
pub mod report;

pub use cga_core;
pub use error::{Error, Result, Stage};
