//! The adaptive loop: propose an experiment, collect outcomes, fold them in,
//! close under Meek's rules, repeat until nothing is uncertain.
//!
//! A round can be driven in one call with an [`Oracle`] ([`round`], [`run`])
//! or split in two ([`propose`], then [`close_round`] once an outside agent
//! has answered), which is how the advisor service uses it.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::graph::{
    apply_outcomes_traced, cpdag_of, meek_closure_traced, Dag, EdgeClass, GraphError, MeekOrientation, PairChange, Pkg,
};
use crate::ip::{self, build_instance, BatchConfig, CostModel, IpConfig, IpError, Objective, SolveOptions};
use crate::oracle::{test_enabled, InterventionSet, Oracle, OracleError, SimulatedOracle, Test, TestOutcome};
use crate::rng::round_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Strategy {
    /// Solve the selection program exactly each round.
    #[default]
    Ip,
    /// Intervene on `k_max` viable vertices drawn uniformly at random, but
    /// never on all of them.
    Random,
}

/// Replaces the round constraints from round `from_round` (zero-based) on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintOverride {
    pub from_round: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub k_max: Option<usize>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PlannerConfig {
    pub strategy: Strategy,
    pub k_max: usize,
    pub budget: Option<f64>,
    /// Zero costs when unset.
    pub costs: Option<CostModel>,
    pub objective: Objective,
    pub batch: BatchConfig,
    /// Round cap; four times the number of vertex pairs when unset.
    pub max_rounds: Option<usize>,
    pub seed: u64,
    pub schedule: Vec<ConstraintOverride>,
    pub tie_threshold: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            strategy: Strategy::Ip,
            k_max: 1,
            budget: None,
            costs: None,
            objective: Objective::Plain,
            batch: BatchConfig::default(),
            max_rounds: None,
            seed: 0,
            schedule: Vec::new(),
            tie_threshold: SolveOptions::default().tie_threshold,
        }
    }
}

impl PlannerConfig {
    pub fn new(strategy: Strategy, k_max: usize, seed: u64) -> Self {
        PlannerConfig {
            strategy,
            k_max,
            seed,
            ..PlannerConfig::default()
        }
    }

    /// Selection settings in force at `round`, after applying the schedule.
    pub fn ip_config(&self, round: usize) -> IpConfig {
        let mut cfg = IpConfig {
            k_max: self.k_max,
            budget: self.budget,
            objective: self.objective.clone(),
            batch: self.batch.clone(),
        };
        let mut steps: Vec<&ConstraintOverride> = self.schedule.iter().filter(|o| o.from_round <= round).collect();
        steps.sort_by_key(|o| o.from_round);
        for o in steps {
            if let Some(k) = o.k_max {
                cfg.k_max = k;
            }
            if let Some(b) = o.budget {
                cfg.budget = Some(b);
            }
        }
        cfg
    }

    pub fn max_rounds_for(&self, n: usize) -> usize {
        self.max_rounds.unwrap_or(4 * crate::graph::pair_count(n)).max(1)
    }

    fn costs_for(&self, n: usize) -> CostModel {
        self.costs.clone().unwrap_or_else(|| CostModel::zero(n))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("every pair is already resolved")]
    NothingToDo,
    #[error("the best affordable intervention set enables no test")]
    Stalled,
    #[error("outcome for {test} was not requested this round")]
    UnexpectedOutcome { test: Test },
    #[error("no outcome for {test}")]
    MissingOutcome { test: Test },
    #[error("round cap of {cap} reached with {} pairs unresolved", .record.final_ambiguity)]
    RoundCap { cap: usize, record: Box<RunRecord> },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ip(#[from] IpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// One round's experiment plan.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Proposal {
    pub round: usize,
    pub batches: Vec<InterventionSet>,
    /// Tests to run under each experiment, parallel to `batches`.
    pub tests: Vec<Vec<Test>>,
    /// Objective value of the plan.
    pub gain: f64,
}

impl Proposal {
    pub fn manipulations(&self) -> usize {
        self.batches.iter().map(InterventionSet::len).sum()
    }

    /// Distinct tests over all experiments.
    pub fn all_tests(&self) -> Vec<Test> {
        let set: BTreeSet<Test> = self.tests.iter().flatten().copied().collect();
        set.into_iter().collect()
    }
}

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundLog {
    pub round: usize,
    pub interventions: Vec<InterventionSet>,
    pub tests: Vec<Test>,
    pub outcomes: Vec<TestOutcome>,
    pub changes: Vec<PairChange>,
    pub orientations: Vec<MeekOrientation>,
    pub gain: f64,
    pub ambiguity_before: usize,
    pub ambiguity_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub rounds: usize,
    pub total_manipulations: usize,
    pub per_round: Vec<RoundLog>,
    pub terminated: bool,
    pub final_ambiguity: usize,
    /// Edges known at the end of the run, sorted.
    pub final_edges: Vec<(usize, usize)>,
}

/// Tests whose context `set` satisfies, for every uncertain pair of `pkg`.
pub fn tests_for(pkg: &Pkg, set: &InterventionSet) -> Vec<Test> {
    let mut tests = Vec::new();
    for (lo, hi, class) in pkg.pairs() {
        let candidates: &[Test] = match class {
            EdgeClass::Unknown => &[
                Test::orientation(lo, hi),
                Test::orientation(hi, lo),
                Test::adjacency(lo, hi),
            ],
            EdgeClass::Adjacent => &[Test::orientation(lo, hi), Test::orientation(hi, lo)],
            EdgeClass::SemiDirected(dir) => {
                let (a, b) = match dir {
                    crate::graph::Dir::Forward => (lo, hi),
                    crate::graph::Dir::Backward => (hi, lo),
                };
                tests.extend(
                    [Test::orientation(a, b), Test::adjacency(a, b)]
                        .into_iter()
                        .filter(|t| test_enabled(t, set)),
                );
                continue;
            }
            _ => continue,
        };
        tests.extend(candidates.iter().filter(|t| test_enabled(t, set)).copied());
    }
    tests
}

/// Plans round `round` for `pkg`.
pub fn propose(pkg: &Pkg, config: &PlannerConfig, round: usize) -> Result<Proposal, PlanError> {
    if pkg.is_resolved() {
        return Err(PlanError::NothingToDo);
    }
    let ipc = config.ip_config(round);
    let costs = config.costs_for(pkg.n());
    let instance = build_instance(pkg, &costs, &ipc)?;
    let mut rng = round_rng(config.seed, round as u64);
    let (batches, gain) = match config.strategy {
        Strategy::Ip => {
            let opts = SolveOptions {
                tie_threshold: config.tie_threshold,
            };
            let sol = ip::solve_with(&instance, &mut rng, &opts)?;
            (sol.batches, sol.objective_value)
        }
        Strategy::Random => {
            let mut pool: Vec<usize> = instance.viable().to_vec();
            let mut batches = Vec::with_capacity(ipc.batch.count);
            for _ in 0..ipc.batch.count {
                // intervening on every viable vertex enables no test at all,
                // so one is always left out
                let k = ipc.k_max.min(pool.len().saturating_sub(1)).max(1).min(pool.len());
                let pick: Vec<usize> = pool.choose_multiple(&mut rng, k).copied().collect();
                pool.retain(|v| !pick.contains(v));
                batches.push(InterventionSet::new(pick));
            }
            let sets: Vec<BTreeSet<usize>> = batches.iter().map(|x: &InterventionSet| x.members().clone()).collect();
            let gain = instance.objective_of(&sets);
            (batches, gain)
        }
    };
    let tests: Vec<Vec<Test>> = batches.iter().map(|x| tests_for(pkg, x)).collect();
    if config.strategy == Strategy::Ip && tests.iter().all(Vec::is_empty) {
        return Err(PlanError::Stalled);
    }
    Ok(Proposal {
        round,
        batches,
        tests,
        gain,
    })
}

/// Folds the answers to `proposal` into `pkg` and closes under Meek's rules.
/// Every issued test must be answered; a test issued under several
/// experiments may be answered once or once per experiment.
pub fn close_round(pkg: &Pkg, proposal: &Proposal, outcomes: &[TestOutcome]) -> Result<(Pkg, RoundLog), PlanError> {
    let issued = proposal.all_tests();
    for o in outcomes {
        if issued.binary_search(&o.test).is_err() {
            return Err(PlanError::UnexpectedOutcome { test: o.test });
        }
    }
    if let Some(&test) = issued.iter().find(|t| !outcomes.iter().any(|o| o.test == **t)) {
        return Err(PlanError::MissingOutcome { test });
    }
    let ambiguity_before = pkg.ambiguity();
    let (updated, changes) = apply_outcomes_traced(pkg, outcomes)?;
    let (closed, orientations) = meek_closure_traced(&updated)?;
    let log = RoundLog {
        round: proposal.round,
        interventions: proposal.batches.clone(),
        tests: issued,
        outcomes: outcomes.to_vec(),
        changes,
        orientations,
        gain: proposal.gain,
        ambiguity_before,
        ambiguity_after: closed.ambiguity(),
    };
    Ok((closed, log))
}

/// One full round against `oracle`.
pub fn round(
    pkg: &Pkg,
    config: &PlannerConfig,
    round: usize,
    oracle: &mut dyn Oracle,
) -> Result<(Pkg, RoundLog), PlanError> {
    let proposal = propose(pkg, config, round)?;
    let mut outcomes = Vec::new();
    for (set, tests) in proposal.batches.iter().zip(&proposal.tests) {
        if !tests.is_empty() {
            outcomes.extend(oracle.answer(set, tests)?);
        }
    }
    close_round(pkg, &proposal, &outcomes)
}

/// Runs rounds from `initial` until every pair is resolved.
pub fn run(initial: &Pkg, config: &PlannerConfig, oracle: &mut dyn Oracle) -> Result<RunRecord, PlanError> {
    let cap = config.max_rounds_for(initial.n());
    let mut pkg = initial.clone();
    let mut per_round = Vec::new();
    while !pkg.is_resolved() {
        if per_round.len() >= cap {
            let record = finish(&pkg, per_round, false);
            return Err(PlanError::RoundCap {
                cap,
                record: Box::new(record),
            });
        }
        let (next, log) = round(&pkg, config, per_round.len(), oracle)?;
        pkg = next;
        per_round.push(log);
    }
    Ok(finish(&pkg, per_round, true))
}

/// Runs from the observational essential graph of `truth`, answering every
/// test from `truth`.
pub fn simulate(truth: &Dag, config: &PlannerConfig) -> Result<RunRecord, PlanError> {
    run(&cpdag_of(truth), config, &mut SimulatedOracle::new(truth))
}

fn finish(pkg: &Pkg, per_round: Vec<RoundLog>, terminated: bool) -> RunRecord {
    let mut final_edges = pkg.known_edges();
    final_edges.sort_unstable();
    RunRecord {
        rounds: per_round.len(),
        total_manipulations: per_round
            .iter()
            .map(|r| r.interventions.iter().map(InterventionSet::len).sum::<usize>())
            .sum(),
        per_round,
        terminated,
        final_ambiguity: pkg.ambiguity(),
        final_edges,
    }
}
