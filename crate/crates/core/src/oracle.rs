//! Answering orientation and adjacency tests, either from a ground-truth DAG
//! or by collecting answers from an outside agent.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::graph::Dag;
pub use crate::graph::{Test, TestOutcome, TestResult};

/// Vertices manipulated together in one experiment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct InterventionSet(BTreeSet<usize>);

impl InterventionSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        InterventionSet(members.into_iter().collect())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.0
    }
}

impl FromIterator<usize> for InterventionSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        InterventionSet::new(iter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{test} cannot be run under intervention set {intervened:?}")]
    TestContext { test: Test, intervened: Vec<usize> },
    #[error("{test} was never issued in this round")]
    UnknownTest { test: Test },
    #[error("{test} already has a recorded result")]
    DuplicateSubmission { test: Test },
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    Index { vertex: usize, n: usize },
}

/// Whether `test` is meaningful under intervention set `set`: an orientation
/// test needs its source intervened and its target not, an adjacency test
/// needs neither endpoint intervened.
pub fn test_enabled(test: &Test, set: &InterventionSet) -> bool {
    match *test {
        Test::Orientation { from, to } => set.contains(from) && !set.contains(to),
        Test::Adjacency { a, b } => !set.contains(a) && !set.contains(b),
    }
}

/// Perfect-oracle answers from the ground truth.
///
/// Intervening on `I` severs the edges into `I`, so under `O(i -> j)` with
/// `i` in `I` and `j` outside it only an `i -> j` edge can show up.
/// Adjacency between two untouched vertices is plain skeleton membership.
pub fn answer_simulated(truth: &Dag, set: &InterventionSet, tests: &[Test]) -> Result<Vec<TestOutcome>, OracleError> {
    tests
        .iter()
        .map(|test| {
            let (lo, hi) = test.pair();
            if hi >= truth.n() {
                return Err(OracleError::Index {
                    vertex: hi,
                    n: truth.n(),
                });
            }
            if !test_enabled(test, set) {
                return Err(OracleError::TestContext {
                    test: *test,
                    intervened: set.iter().collect(),
                });
            }
            let present = match *test {
                Test::Orientation { from, to } => truth.has_edge(from, to),
                Test::Adjacency { .. } => truth.adjacent(lo, hi),
            };
            Ok(TestOutcome::new(
                *test,
                if present {
                    TestResult::Present
                } else {
                    TestResult::Absent
                },
            ))
        })
        .collect()
}

/// Source of outcomes for the planner's simulation loop.
pub trait Oracle {
    /// Answers `tests`, all issued under intervention set `set`.
    fn answer(&mut self, set: &InterventionSet, tests: &[Test]) -> Result<Vec<TestOutcome>, OracleError>;
}

/// [`Oracle`] backed by a ground-truth DAG.
#[derive(Debug, Clone)]
pub struct SimulatedOracle<'a> {
    truth: &'a Dag,
}

impl<'a> SimulatedOracle<'a> {
    pub fn new(truth: &'a Dag) -> Self {
        SimulatedOracle { truth }
    }
}

impl Oracle for SimulatedOracle<'_> {
    fn answer(&mut self, set: &InterventionSet, tests: &[Test]) -> Result<Vec<TestOutcome>, OracleError> {
        answer_simulated(self.truth, set, tests)
    }
}

/// One round of tests waiting on an outside agent (a lab, a person).
///
/// Results are write-once. Every accepted submission is also appended to a
/// ledger in arrival order so the round can be replayed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PendingRound {
    issued: Vec<Test>,
    answers: BTreeMap<Test, TestResult>,
    ledger: Vec<TestOutcome>,
}

impl PendingRound {
    /// Issues the tests of a round.
    pub fn issue(tests: impl IntoIterator<Item = Test>) -> Self {
        let mut issued: Vec<Test> = tests.into_iter().collect();
        issued.sort_unstable();
        issued.dedup();
        PendingRound {
            issued,
            answers: BTreeMap::new(),
            ledger: Vec::new(),
        }
    }

    pub fn issued(&self) -> &[Test] {
        &self.issued
    }

    pub fn submit(&mut self, test: Test, result: TestResult) -> Result<(), OracleError> {
        if self.issued.binary_search(&test).is_err() {
            return Err(OracleError::UnknownTest { test });
        }
        if self.answers.contains_key(&test) {
            return Err(OracleError::DuplicateSubmission { test });
        }
        self.answers.insert(test, result);
        self.ledger.push(TestOutcome::new(test, result));
        Ok(())
    }

    /// Tests still waiting for a result.
    pub fn unanswered(&self) -> Vec<Test> {
        self.issued
            .iter()
            .filter(|t| !self.answers.contains_key(t))
            .copied()
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.answers.len() == self.issued.len()
    }

    /// All outcomes in issue order, once every test is answered.
    pub fn complete_answer(&self) -> Option<Vec<TestOutcome>> {
        self.is_complete().then(|| {
            self.issued
                .iter()
                .map(|t| TestOutcome::new(*t, self.answers[t]))
                .collect()
        })
    }

    /// Accepted submissions in arrival order.
    pub fn ledger(&self) -> &[TestOutcome] {
        &self.ledger
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_dag;
    use alloc::vec;

    #[test]
    fn simulated_answers() {
        let truth = validate_dag(2, &[(0, 1)]).unwrap();
        let got = answer_simulated(&truth, &InterventionSet::new([0]), &[Test::orientation(0, 1)]).unwrap();
        assert_eq!(got[0].result, TestResult::Present);
        let got = answer_simulated(&truth, &InterventionSet::new([1]), &[Test::orientation(1, 0)]).unwrap();
        assert_eq!(got[0].result, TestResult::Absent);
    }

    #[test]
    fn adjacency_is_not_reachability() {
        let truth = validate_dag(3, &[(0, 1), (1, 2)]).unwrap();
        let got = answer_simulated(&truth, &InterventionSet::default(), &[Test::adjacency(0, 2)]).unwrap();
        assert_eq!(got[0].result, TestResult::Absent);
    }

    #[test]
    fn context_violations_are_rejected() {
        let truth = validate_dag(3, &[(0, 1)]).unwrap();
        let both = InterventionSet::new([0, 1]);
        for t in [Test::orientation(0, 1), Test::orientation(1, 0), Test::adjacency(0, 1)] {
            assert!(matches!(
                answer_simulated(&truth, &both, &[t]),
                Err(OracleError::TestContext { .. })
            ));
        }
        let none = InterventionSet::default();
        assert!(answer_simulated(&truth, &none, &[Test::orientation(0, 1)]).is_err());
    }

    #[test]
    fn pending_round_completes_once_everything_is_answered() {
        let mut round = PendingRound::issue([Test::orientation(0, 1)]);
        round.submit(Test::orientation(0, 1), TestResult::Present).unwrap();
        assert_eq!(
            round.complete_answer(),
            Some(vec![TestOutcome::new(Test::orientation(0, 1), TestResult::Present)])
        );
    }

    #[test]
    fn partial_round_stays_pending() {
        let mut round = PendingRound::issue([Test::orientation(0, 1), Test::adjacency(1, 2)]);
        round.submit(Test::adjacency(2, 1), TestResult::Absent).unwrap();
        assert!(round.complete_answer().is_none());
        assert_eq!(round.unanswered(), vec![Test::orientation(0, 1)]);
    }

    #[test]
    fn foreign_and_repeated_submissions_fail() {
        let mut round = PendingRound::issue([Test::orientation(0, 1)]);
        assert_eq!(
            round.submit(Test::orientation(1, 0), TestResult::Present),
            Err(OracleError::UnknownTest {
                test: Test::orientation(1, 0)
            })
        );
        round.submit(Test::orientation(0, 1), TestResult::Absent).unwrap();
        assert_eq!(
            round.submit(Test::orientation(0, 1), TestResult::Present),
            Err(OracleError::DuplicateSubmission {
                test: Test::orientation(0, 1)
            })
        );
        assert_eq!(round.ledger().len(), 1);
    }
}
