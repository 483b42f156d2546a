//! Graph data model: ground-truth DAGs, the partially known graph (PKG),
//! essential-graph construction, Meek propagation, outcome transitions and a
//! brute-force Markov-equivalence enumerator used as a test oracle.

mod cpdag;
mod dag;
mod mec;
mod meek;
mod pkg;
mod transitions;

use alloc::vec::Vec;

pub use cpdag::cpdag_of;
pub use dag::{validate_dag, Dag};
pub use mec::{enumerate_mec, enumerate_mec_with_limit, markov_equivalents, DEFAULT_MEC_PAIR_LIMIT};
pub use meek::{meek_closure, meek_closure_shuffled, meek_closure_traced, MeekOrientation, MeekRule};
pub use pkg::{ambiguity, pair_count, Dir, EdgeClass, Pkg};
pub use transitions::{apply_outcomes, apply_outcomes_traced, PairChange, Test, TestOutcome, TestResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("directed cycle through vertices {cycle:?}")]
    Cycle { cycle: Vec<usize> },
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    Index { vertex: usize, n: usize },
    #[error("pair {{{a}, {b}}} is classified more than once")]
    DuplicatePair { a: usize, b: usize },
    #[error("inconsistent PKG: orienting {from} -> {to} closes a directed cycle among known edges")]
    InconsistentPkg { from: usize, to: usize },
    #[error("{test} is not defined for a pair classified {class}")]
    InvalidTest { test: Test, class: EdgeClass },
    #[error("outcomes for pair {{{a}, {b}}} contradict each other")]
    Conflict { a: usize, b: usize },
    #[error("{pairs} undirected pairs exceed the enumeration limit of {limit}")]
    TooLarge { pairs: usize, limit: usize },
    #[error("MEC enumeration requires only known, adjacent and absent pairs")]
    NotAnEssentialGraph,
}
