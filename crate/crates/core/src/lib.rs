//! Constrained derivative-free optimization with interruptible, cost-metered
//! sequential evaluation of constraints.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! - [`problem`]: sequentially evaluable problems and the tension/compression
//!   spring design instance,
//! - [`evaluator`]: the cost ledger, evaluation cache and interruption policies,
//! - [`mads`]: a deterministic poll-only mesh adaptive direct search engine,
//! - [`strategies`]: the EB, PB, Int and Hier constraint-handling procedures,
//! - [`harness`]: instance generation, Latin hypercube feasibility studies,
//!   campaigns and data profiles.
//!
//! IO, file formats and the command-line tool live in the `seqmads` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod evaluator;
pub mod extreal;
pub mod harness;
pub mod mads;
pub mod problem;
pub mod strategies;
pub mod trace;

pub use error::{Error, Result};
pub use evaluator::{
    partial_sum, violation, CostLedger, EvalOrder, EvalOutcome, Evaluator, InterruptionPolicy,
};
pub use mads::{Acceptor, Decision, MeshState, SolverConfig};
pub use problem::{BestKnown, FunctionId, Problem, Tcsd};
pub use strategies::ProcedureId;
pub use trace::{Phase, RunTrace};
