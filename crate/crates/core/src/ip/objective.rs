use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{cost_of, CostModel, IpError};
use crate::graph::{Dir, EdgeClass, Pkg};

/// Weight override for one pair. For semi-directed edges `(a, b)` is the
/// candidate direction `a -> b`; otherwise the order does not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairWeight {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Per-class edge weights; pairs without an override get `default`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct EdgeWeights {
    pub default: f64,
    pub unknown: Vec<PairWeight>,
    pub semidirected: Vec<PairWeight>,
    pub adjacent: Vec<PairWeight>,
}

impl Default for EdgeWeights {
    fn default() -> Self {
        EdgeWeights {
            default: 1.0,
            unknown: Vec::new(),
            semidirected: Vec::new(),
            adjacent: Vec::new(),
        }
    }
}

impl EdgeWeights {
    fn validate(&self) -> Result<(), IpError> {
        let all = self
            .unknown
            .iter()
            .chain(&self.semidirected)
            .chain(&self.adjacent)
            .map(|w| w.weight);
        for w in core::iter::once(self.default).chain(all) {
            if !w.is_finite() || w < 0.0 {
                return Err(IpError::Config(format!(
                    "edge weights must be finite and non-negative, got {w}"
                )));
            }
        }
        Ok(())
    }

    fn lookup(&self) -> WeightLookup {
        let unordered = |list: &[PairWeight]| -> BTreeMap<(usize, usize), f64> {
            list.iter().map(|w| ((w.a.min(w.b), w.a.max(w.b)), w.weight)).collect()
        };
        WeightLookup {
            default: self.default,
            unknown: unordered(&self.unknown),
            semidirected: self.semidirected.iter().map(|w| ((w.a, w.b), w.weight)).collect(),
            adjacent: unordered(&self.adjacent),
        }
    }
}

struct WeightLookup {
    default: f64,
    unknown: BTreeMap<(usize, usize), f64>,
    semidirected: BTreeMap<(usize, usize), f64>,
    adjacent: BTreeMap<(usize, usize), f64>,
}

/// What the planner maximizes each round.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Objective {
    /// Number of uncertain pairs that get a resolving test.
    #[default]
    Plain,
    /// Weighted count of tested pairs.
    Weighted { weights: EdgeWeights },
    /// Count restricted to the listed unordered pairs.
    Targeted { relevant: Vec<(usize, usize)> },
    /// Optionally weighted count minus `lambda` times the experiment cost.
    CostPenalty {
        lambda: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        weights: Option<EdgeWeights>,
    },
}

impl Objective {
    pub fn validate(&self) -> Result<(), IpError> {
        match self {
            Objective::Plain | Objective::Targeted { .. } => Ok(()),
            Objective::Weighted { weights } => weights.validate(),
            Objective::CostPenalty { lambda, weights } => {
                if !lambda.is_finite() || *lambda < 0.0 {
                    return Err(IpError::Config(format!(
                        "lambda must be finite and non-negative, got {lambda}"
                    )));
                }
                weights.as_ref().map_or(Ok(()), EdgeWeights::validate)
            }
        }
    }

    /// Cost penalty factor; zero for every kind but cost-penalty.
    pub fn lambda(&self) -> f64 {
        match self {
            Objective::CostPenalty { lambda, .. } => *lambda,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TermKind {
    Unknown,
    SemiDirected,
    Adjacent,
}

/// One uncertain pair's contribution to the objective. For semi-directed
/// pairs `(a, b)` is the candidate edge `a -> b`; otherwise `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeTerm {
    pub kind: TermKind,
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl EdgeTerm {
    /// Whether some resolving test is enabled for this pair when exactly the
    /// vertices satisfying `chosen` are intervened on.
    ///
    /// - unknown: an orientation test if exactly one endpoint is chosen, an
    ///   adjacency test if neither is;
    /// - semi-directed `a -> b`: needs `b` untouched (orientation test when
    ///   `a` is chosen, adjacency test when not);
    /// - adjacent: exactly one endpoint chosen.
    #[inline]
    pub fn counted(&self, chosen: impl Fn(usize) -> bool) -> bool {
        let (x, y) = (chosen(self.a), chosen(self.b));
        match self.kind {
            TermKind::Unknown => !(x && y),
            TermKind::SemiDirected => !y,
            TermKind::Adjacent => x != y,
        }
    }
}

/// Objective terms for every uncertain pair of `pkg`, in pair order.
pub fn terms_for(pkg: &Pkg, objective: &Objective) -> Vec<EdgeTerm> {
    let lookup = match objective {
        Objective::Weighted { weights }
        | Objective::CostPenalty {
            weights: Some(weights), ..
        } => Some(weights.lookup()),
        _ => None,
    };
    let relevant: Option<BTreeSet<(usize, usize)>> = match objective {
        Objective::Targeted { relevant } => Some(relevant.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()),
        _ => None,
    };
    let mut terms = Vec::new();
    for (lo, hi, class) in pkg.pairs() {
        let (kind, a, b) = match class {
            EdgeClass::Unknown => (TermKind::Unknown, lo, hi),
            EdgeClass::Adjacent => (TermKind::Adjacent, lo, hi),
            EdgeClass::SemiDirected(Dir::Forward) => (TermKind::SemiDirected, lo, hi),
            EdgeClass::SemiDirected(Dir::Backward) => (TermKind::SemiDirected, hi, lo),
            _ => continue,
        };
        let weight = match (&lookup, &relevant) {
            (Some(w), _) => {
                let table = match kind {
                    TermKind::Unknown => &w.unknown,
                    TermKind::SemiDirected => &w.semidirected,
                    TermKind::Adjacent => &w.adjacent,
                };
                table.get(&(a, b)).copied().unwrap_or(w.default)
            }
            (None, Some(rel)) => {
                if rel.contains(&(lo, hi)) {
                    1.0
                } else {
                    0.0
                }
            }
            (None, None) => 1.0,
        };
        terms.push(EdgeTerm { kind, a, b, weight });
    }
    terms
}

/// Closed-form objective of intervening on `chosen`: the weight of every
/// uncertain pair with an enabled resolving test, minus the cost penalty
/// for the cost-penalty objective.
pub fn gain(pkg: &Pkg, chosen: &BTreeSet<usize>, objective: &Objective, costs: &CostModel) -> f64 {
    let tested: f64 = terms_for(pkg, objective)
        .iter()
        .filter(|t| t.counted(|v| chosen.contains(&v)))
        .map(|t| t.weight)
        .sum();
    let lambda = objective.lambda();
    if lambda == 0.0 {
        tested
    } else {
        tested - lambda * cost_of(chosen, costs, &pkg.viable_vertices())
    }
}
