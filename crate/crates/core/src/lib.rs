//! Computationally guided agents for long-only portfolio optimization.
//!
//! A roster of solver agents (mean-variance QP, robust LP with a budget of
//! uncertainty, risk-based allocations and a continuous ant colony search)
//! fills a [`SolutionBank`] with optimal weight vectors. A simulated
//! annealing super-agent then searches a penalized mean-variance objective,
//! generating every neighbour by moving towards the bank entry nearest to
//! the current state.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the pipeline
//! and the command line live in the `cga` companion crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod acor;
pub mod anneal;
pub mod bank;
pub mod bench;
mod error;
pub mod formulations;
pub mod linalg;
pub mod market;
pub mod solvers;

pub use bank::{AgentClass, BankEntry, SolutionBank};
pub use error::{Error, Result};
pub use formulations::{PenaltyMode, PenaltyParams, RobustParams, WeightVector};
pub use linalg::Matrix;
pub use market::{MarketEstimates, ReturnKind, ReturnMatrix};
pub use solvers::{SolveReport, SolveStatus};
