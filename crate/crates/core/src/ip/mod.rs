//! The per-round intervention selection problem.
//!
//! Decision variables: `X_i` (vertex `i` intervened), `O_ij` (orientation
//! test on `i -> j`), `A_ij` (adjacency test on `{i, j}`), and the update
//! indicators `IDU`/`IDS`/`IDA` for unknown, semi-directed and adjacent
//! pairs. With `X` fixed every other indicator is determined, so the solver
//! searches over `X` alone and scores candidates with the closed form in
//! [`gain`]; [`IpSolution::indicators`] recovers the full assignment.

mod brute;
mod cost;
mod objective;
mod solver;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use brute::{solve_bruteforce, solve_bruteforce_with_limit, BruteForceSolution, DEFAULT_BRUTE_FORCE_LIMIT};
pub use cost::{cost_of, CostModel, Interaction};
pub use objective::{gain, terms_for, EdgeTerm, EdgeWeights, Objective, PairWeight, TermKind};
pub use solver::{solve, solve_with, SolveOptions};

use crate::graph::Pkg;
use crate::oracle::InterventionSet;

/// Absolute tolerance for budget checks and for detecting tied objectives.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IpError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no intervention set satisfies the budget constraints")]
    Infeasible,
    #[error("{viable} viable vertices exceed the enumeration limit of {limit}")]
    TooLarge { viable: usize, limit: usize },
}

/// Several disjoint experiments chosen at once and run in parallel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BatchConfig {
    /// Number of experiments per round.
    pub count: usize,
    /// Budget of each experiment; falls back to the round budget when unset.
    pub budgets: Option<Vec<f64>>,
    /// Cap on the summed intervention cost over all experiments.
    pub total_budget: Option<f64>,
    /// Credit each pair at most once across the batch instead of once per
    /// experiment that tests it.
    pub cap_edge_credit: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            count: 1,
            budgets: None,
            total_budget: None,
            cap_edge_credit: false,
        }
    }
}

/// Constraint and objective settings for one round.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IpConfig {
    pub k_max: usize,
    /// Per-experiment budget; no budget constraint when `None`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub budget: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub objective: Objective,
    #[cfg_attr(feature = "serde", serde(default))]
    pub batch: BatchConfig,
}

impl IpConfig {
    pub fn with_k_max(k_max: usize) -> Self {
        IpConfig {
            k_max,
            budget: None,
            objective: Objective::Plain,
            batch: BatchConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), IpError> {
        if self.k_max < 1 {
            return Err(IpError::Config("k_max must be at least 1".into()));
        }
        if self.batch.count < 1 {
            return Err(IpError::Config("batch count must be at least 1".into()));
        }
        if let Some(b) = &self.batch.budgets {
            if b.len() != self.batch.count {
                return Err(IpError::Config(format!(
                    "{} per-experiment budgets for {} experiments",
                    b.len(),
                    self.batch.count
                )));
            }
        }
        let budgets = self
            .budget
            .iter()
            .chain(self.batch.budgets.iter().flatten())
            .chain(&self.batch.total_budget);
        if let Some(b) = budgets.into_iter().find(|b| b.is_nan()) {
            return Err(IpError::Config(format!("budget {b} is not a number")));
        }
        self.objective.validate()
    }
}

/// One round's selection problem, built from a PKG.
#[derive(Debug, Clone, PartialEq)]
pub struct IpInstance {
    n: usize,
    viable: Vec<usize>,
    terms: Vec<EdgeTerm>,
    costs: CostModel,
    config: IpConfig,
}

/// Builds the selection problem for `pkg`.
pub fn build_instance(pkg: &Pkg, costs: &CostModel, config: &IpConfig) -> Result<IpInstance, IpError> {
    config.validate()?;
    costs.validate()?;
    if costs.n() != pkg.n() {
        return Err(IpError::Config(format!(
            "cost model covers {} vertices, graph has {}",
            costs.n(),
            pkg.n()
        )));
    }
    Ok(IpInstance {
        n: pkg.n(),
        viable: pkg.viable_vertices(),
        terms: terms_for(pkg, &config.objective),
        costs: costs.clone(),
        config: config.clone(),
    })
}

impl IpInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertices incident to an uncertain pair; only these may be chosen.
    pub fn viable(&self) -> &[usize] {
        &self.viable
    }

    pub fn terms(&self) -> &[EdgeTerm] {
        &self.terms
    }

    pub fn costs(&self) -> &CostModel {
        &self.costs
    }

    pub fn config(&self) -> &IpConfig {
        &self.config
    }

    pub fn k_max(&self) -> usize {
        self.config.k_max
    }

    pub fn batch_count(&self) -> usize {
        self.config.batch.count
    }

    /// Budget that applies to experiment `b`, if any.
    pub fn budget_for(&self, b: usize) -> Option<f64> {
        match &self.config.batch.budgets {
            Some(list) => Some(list[b]),
            None => self.config.budget,
        }
    }

    /// Ordered pairs carrying an `O` variable: both directions of unknown
    /// and adjacent pairs, the candidate direction of semi-directed ones.
    pub fn orientation_vars(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t in &self.terms {
            out.push((t.a, t.b));
            if t.kind != TermKind::SemiDirected {
                out.push((t.b, t.a));
            }
        }
        out
    }

    /// Unordered pairs `(lo, hi)` carrying an `A` variable: unknown and
    /// semi-directed pairs.
    pub fn adjacency_vars(&self) -> Vec<(usize, usize)> {
        self.terms
            .iter()
            .filter(|t| t.kind != TermKind::Adjacent)
            .map(|t| (t.a.min(t.b), t.a.max(t.b)))
            .collect()
    }

    /// Pairs carrying an update indicator of the given kind.
    pub fn update_vars(&self, kind: TermKind) -> Vec<(usize, usize)> {
        self.terms
            .iter()
            .filter(|t| t.kind == kind)
            .map(|t| (t.a, t.b))
            .collect()
    }

    /// Whether one experiment `chosen` satisfies the size and budget
    /// constraints of experiment slot `b`.
    pub fn feasible(&self, chosen: &BTreeSet<usize>, b: usize) -> bool {
        chosen.len() <= self.k_max()
            && chosen.iter().all(|v| self.viable.binary_search(v).is_ok())
            && self
                .budget_for(b)
                .is_none_or(|budget| cost_of(chosen, &self.costs, &self.viable) <= budget + TOLERANCE)
    }

    /// Objective value of a full batch assignment, evaluated directly.
    pub fn objective_of(&self, batches: &[BTreeSet<usize>]) -> f64 {
        let tested: f64 = if self.config.batch.cap_edge_credit {
            self.terms
                .iter()
                .filter(|t| batches.iter().any(|x| t.counted(|v| x.contains(&v))))
                .map(|t| t.weight)
                .sum()
        } else {
            batches
                .iter()
                .map(|x| {
                    self.terms
                        .iter()
                        .filter(|t| t.counted(|v| x.contains(&v)))
                        .map(|t| t.weight)
                        .sum::<f64>()
                })
                .sum()
        };
        let lambda = self.config.objective.lambda();
        if lambda == 0.0 {
            return tested;
        }
        tested
            - lambda
                * batches
                    .iter()
                    .map(|x| cost_of(x, &self.costs, &self.viable))
                    .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SolveStatus {
    Optimal,
}

/// An optimal choice of intervention sets, one per experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IpSolution {
    pub batches: Vec<InterventionSet>,
    pub objective_value: f64,
    pub status: SolveStatus,
    /// Optimal assignments the tie-break drew from.
    pub optima_seen: usize,
    /// Search nodes visited.
    pub nodes: u64,
}

/// The full 0-1 assignment implied by one experiment's `X`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Indicators {
    pub x: Vec<usize>,
    pub o: Vec<(usize, usize)>,
    pub a: Vec<(usize, usize)>,
    pub idu: Vec<(usize, usize)>,
    pub ids: Vec<(usize, usize)>,
    pub ida: Vec<(usize, usize)>,
    /// Indices into the cost model's interactions that are active.
    pub y: Vec<usize>,
}

impl IpSolution {
    /// The first (for single-experiment rounds, the only) intervention set.
    pub fn interventions(&self) -> &InterventionSet {
        &self.batches[0]
    }

    pub fn manipulations(&self) -> usize {
        self.batches.iter().map(InterventionSet::len).sum()
    }

    /// Derived indicator assignment for every experiment.
    pub fn indicators(&self, instance: &IpInstance) -> Vec<Indicators> {
        self.batches
            .iter()
            .map(|x| indicators_for(instance, x.members()))
            .collect()
    }
}

/// Indicators that `chosen` switches on: a test variable is 1 exactly when
/// its context holds, an update indicator is 1 exactly when one of its
/// tests is 1.
pub fn indicators_for(instance: &IpInstance, chosen: &BTreeSet<usize>) -> Indicators {
    let x = |v: usize| chosen.contains(&v);
    let o: Vec<(usize, usize)> = instance
        .orientation_vars()
        .into_iter()
        .filter(|&(i, j)| x(i) && !x(j))
        .collect();
    let a: Vec<(usize, usize)> = instance
        .adjacency_vars()
        .into_iter()
        .filter(|&(i, j)| !x(i) && !x(j))
        .collect();
    let mut ind = Indicators {
        x: chosen.iter().copied().collect(),
        ..Indicators::default()
    };
    for t in instance.terms() {
        if t.counted(x) {
            let slot = match t.kind {
                TermKind::Unknown => &mut ind.idu,
                TermKind::SemiDirected => &mut ind.ids,
                TermKind::Adjacent => &mut ind.ida,
            };
            slot.push((t.a, t.b));
        }
    }
    ind.y = instance
        .costs()
        .interactions()
        .iter()
        .enumerate()
        .filter(|(_, it)| it.members.iter().all(|&m| x(m)))
        .map(|(k, _)| k)
        .collect();
    ind.o = o;
    ind.a = a;
    ind
}
