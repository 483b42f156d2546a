//! Folding test outcomes into a PKG.
//!
//! Each pair's class is read as the set of worlds still possible for it:
//! no edge, `lo -> hi`, or `hi -> lo`. An outcome removes the worlds it rules
//! out and the surviving set is mapped back to a class. For a single outcome
//! this reproduces the transition table exactly:
//!
//! | from           | test          | present        | absent              |
//! |----------------|---------------|----------------|---------------------|
//! | unknown        | O(i->j)       | known i->j     | semi-directed j->i  |
//! | unknown        | A{i,j}        | adjacent       | absent              |
//! | semi-dir. i->j | O(i->j), A    | known i->j     | absent              |
//! | adjacent       | O(i->j)       | known i->j     | known j->i          |
//!
//! Several outcomes on one pair (batched experiments) are intersected; an
//! empty intersection is a conflict.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::{Dir, EdgeClass, GraphError, Pkg};

/// An orientation test `O(from -> to)` or an adjacency test `A{a, b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum Test {
    Orientation { from: usize, to: usize },
    Adjacency { a: usize, b: usize },
}

impl Test {
    pub fn orientation(from: usize, to: usize) -> Test {
        Test::Orientation { from, to }
    }

    /// Adjacency test with endpoints normalized to `a < b`.
    pub fn adjacency(a: usize, b: usize) -> Test {
        Test::Adjacency {
            a: a.min(b),
            b: a.max(b),
        }
    }

    /// The unordered pair under test, as `(lo, hi)`.
    pub fn pair(&self) -> (usize, usize) {
        let (a, b) = match *self {
            Test::Orientation { from, to } => (from, to),
            Test::Adjacency { a, b } => (a, b),
        };
        (a.min(b), a.max(b))
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Test::Orientation { from, to } => write!(f, "O({from}->{to})"),
            Test::Adjacency { a, b } => write!(f, "A{{{a},{b}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TestResult {
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestOutcome {
    pub test: Test,
    pub result: TestResult,
}

impl TestOutcome {
    pub fn new(test: Test, result: TestResult) -> Self {
        TestOutcome { test, result }
    }
}

/// A pair whose class changed, with both classes relative to `a -> b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairChange {
    pub a: usize,
    pub b: usize,
    pub before: EdgeClass,
    pub after: EdgeClass,
}

const NONE: u8 = 1;
const FWD: u8 = 2;
const BWD: u8 = 4;

fn worlds(class: EdgeClass) -> u8 {
    match class {
        EdgeClass::Known(Dir::Forward) => FWD,
        EdgeClass::Known(Dir::Backward) => BWD,
        EdgeClass::Adjacent => FWD | BWD,
        EdgeClass::SemiDirected(Dir::Forward) => NONE | FWD,
        EdgeClass::SemiDirected(Dir::Backward) => NONE | BWD,
        EdgeClass::Unknown => NONE | FWD | BWD,
        EdgeClass::Absent => NONE,
    }
}

fn class_of(worlds: u8) -> Option<EdgeClass> {
    Some(match worlds {
        FWD => EdgeClass::Known(Dir::Forward),
        BWD => EdgeClass::Known(Dir::Backward),
        x if x == FWD | BWD => EdgeClass::Adjacent,
        x if x == NONE | FWD => EdgeClass::SemiDirected(Dir::Forward),
        x if x == NONE | BWD => EdgeClass::SemiDirected(Dir::Backward),
        x if x == NONE | FWD | BWD => EdgeClass::Unknown,
        NONE => EdgeClass::Absent,
        _ => return None,
    })
}

/// Whether `test` is defined for a pair currently classified `class`
/// (class relative to the pair `(lo, hi)`).
fn defined(test: &Test, class: EdgeClass) -> bool {
    match *test {
        Test::Orientation { from, to } => {
            let dir = if from < to { Dir::Forward } else { Dir::Backward };
            match class {
                EdgeClass::Unknown | EdgeClass::Adjacent => true,
                EdgeClass::SemiDirected(d) => d == dir,
                _ => false,
            }
        }
        Test::Adjacency { .. } => matches!(class, EdgeClass::Unknown | EdgeClass::SemiDirected(_)),
    }
}

/// Applies one batch of outcomes and returns the updated PKG.
pub fn apply_outcomes(pkg: &Pkg, outcomes: &[TestOutcome]) -> Result<Pkg, GraphError> {
    apply_outcomes_traced(pkg, outcomes).map(|(p, _)| p)
}

/// Like [`apply_outcomes`], also listing every pair whose class changed.
pub fn apply_outcomes_traced(pkg: &Pkg, outcomes: &[TestOutcome]) -> Result<(Pkg, Vec<PairChange>), GraphError> {
    let n = pkg.n();
    let mut surviving: BTreeMap<(usize, usize), u8> = BTreeMap::new();
    for outcome in outcomes {
        let (lo, hi) = outcome.test.pair();
        for v in [lo, hi] {
            if v >= n {
                return Err(GraphError::Index { vertex: v, n });
            }
        }
        if lo == hi {
            return Err(GraphError::SelfLoop { vertex: lo });
        }
        let class = pkg.class(lo, hi);
        if !defined(&outcome.test, class) {
            let shown = match outcome.test {
                Test::Orientation { from, to } => pkg.class(from, to),
                Test::Adjacency { .. } => class,
            };
            return Err(GraphError::InvalidTest {
                test: outcome.test,
                class: shown,
            });
        }
        let keep = match (outcome.test, outcome.result) {
            (Test::Orientation { from, .. }, result) => {
                let dir = if from == lo { FWD } else { BWD };
                match result {
                    TestResult::Present => dir,
                    TestResult::Absent => !dir,
                }
            }
            (Test::Adjacency { .. }, TestResult::Present) => !NONE,
            (Test::Adjacency { .. }, TestResult::Absent) => NONE,
        };
        let entry = surviving.entry((lo, hi)).or_insert_with(|| worlds(class));
        *entry &= keep;
        if *entry == 0 {
            return Err(GraphError::Conflict { a: lo, b: hi });
        }
    }

    let mut out = pkg.clone();
    let mut changes = Vec::new();
    for ((lo, hi), w) in surviving {
        let after = class_of(w).ok_or(GraphError::Conflict { a: lo, b: hi })?;
        let before = pkg.class(lo, hi);
        if after != before {
            out.set(lo, hi, after);
            changes.push(PairChange {
                a: lo,
                b: hi,
                before,
                after,
            });
        }
    }
    out.check_known_acyclic()?;
    Ok((out, changes))
}
