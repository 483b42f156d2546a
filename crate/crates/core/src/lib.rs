//! Adaptive intervention planning for causal structure discovery.
//!
//! The crate keeps a partially known graph ([`Pkg`]) of a hidden causal DAG,
//! picks the most informative intervention set each round by solving an exact
//! 0-1 program ([`ip`]), folds the experiment outcomes back into the PKG
//! ([`graph::apply_outcomes`]), propagates orientations with Meek's rules
//! ([`graph::meek_closure`]) and repeats until every pair is resolved
//! ([`planner::run`]).
//!
//! Everything here is `no_std` with `alloc`. File formats, the benchmark
//! harness, the HTTP advisor service and the CLI live in the `intervene`
//! companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod generate;
pub mod graph;
pub mod ip;
pub mod oracle;
pub mod planner;
pub mod rng;

pub use graph::{Dag, Dir, EdgeClass, GraphError, Pkg};
pub use ip::{CostModel, IpConfig, IpInstance, IpSolution, Objective};
pub use oracle::{InterventionSet, Test, TestOutcome, TestResult};
pub use planner::{PlannerConfig, RunRecord, Strategy};
