use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::dag::find_cycle;
use super::{Dag, GraphError};

/// Direction of an oriented class, relative to the pair `(i, j)` it was
/// queried with: `Forward` is `i -> j`, `Backward` is `j -> i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Dir {
    Forward,
    Backward,
}

impl Dir {
    pub fn reverse(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

/// Knowledge state of one unordered vertex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EdgeClass {
    /// Edge present with a confirmed orientation.
    Known(Dir),
    /// Edge present, orientation open.
    Adjacent,
    /// Either the edge exists in the given direction or it does not exist.
    SemiDirected(Dir),
    /// Nothing is known.
    Unknown,
    /// Confirmed non-adjacent.
    Absent,
}

impl EdgeClass {
    pub fn is_resolved(self) -> bool {
        matches!(self, EdgeClass::Known(_) | EdgeClass::Absent)
    }

    fn reversed(self) -> EdgeClass {
        match self {
            EdgeClass::Known(d) => EdgeClass::Known(d.reverse()),
            EdgeClass::SemiDirected(d) => EdgeClass::SemiDirected(d.reverse()),
            other => other,
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeClass::Known(_) => "known",
            EdgeClass::Adjacent => "adjacent",
            EdgeClass::SemiDirected(_) => "semidirected",
            EdgeClass::Unknown => "unknown",
            EdgeClass::Absent => "absent",
        })
    }
}

/// Number of unordered pairs over `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Partially known graph: a total map from unordered vertex pairs to
/// [`EdgeClass`]. Known edges are kept acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pkg {
    n: usize,
    // triangular, indexed by (lo, hi); directions stored relative to lo -> hi
    classes: Vec<EdgeClass>,
}

impl Pkg {
    /// Every pair absent.
    pub fn absent(n: usize) -> Self {
        Self::filled(n, EdgeClass::Absent)
    }

    /// Every pair unknown: the state of zero prior knowledge.
    pub fn unknown(n: usize) -> Self {
        Self::filled(n, EdgeClass::Unknown)
    }

    fn filled(n: usize, class: EdgeClass) -> Self {
        Pkg {
            n,
            classes: vec![class; pair_count(n)],
        }
    }

    /// Builds a PKG from per-class pair lists; unlisted pairs are absent.
    /// `known` and `semidirected` pairs are ordered `(from, to)`.
    pub fn from_parts(
        n: usize,
        known: &[(usize, usize)],
        adjacent: &[(usize, usize)],
        semidirected: &[(usize, usize)],
        unknown: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let mut pkg = Pkg::absent(n);
        let mut listed = BTreeSet::new();
        let groups = [
            (known, EdgeClass::Known(Dir::Forward)),
            (adjacent, EdgeClass::Adjacent),
            (semidirected, EdgeClass::SemiDirected(Dir::Forward)),
            (unknown, EdgeClass::Unknown),
        ];
        for (pairs, class) in groups {
            for &(a, b) in pairs {
                for v in [a, b] {
                    if v >= n {
                        return Err(GraphError::Index { vertex: v, n });
                    }
                }
                if a == b {
                    return Err(GraphError::SelfLoop { vertex: a });
                }
                if !listed.insert((a.min(b), a.max(b))) {
                    return Err(GraphError::DuplicatePair { a, b });
                }
                pkg.set(a, b, class);
            }
        }
        pkg.check_known_acyclic()?;
        Ok(pkg)
    }

    /// PKG that knows the DAG completely: its edges known, everything else absent.
    pub fn from_dag(dag: &Dag) -> Self {
        let mut pkg = Pkg::absent(dag.n());
        for &(a, b) in dag.edges() {
            pkg.set(a, b, EdgeClass::Known(Dir::Forward));
        }
        pkg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a != b && a < self.n && b < self.n);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1)
    }

    /// Class of the pair, with any direction expressed relative to `(a, b)`.
    #[inline]
    pub fn class(&self, a: usize, b: usize) -> EdgeClass {
        let c = self.classes[self.index(a, b)];
        if a < b {
            c
        } else {
            c.reversed()
        }
    }

    /// Sets the class of the pair; directions are relative to `(a, b)`.
    /// Does not check acyclicity of known edges.
    #[inline]
    pub fn set(&mut self, a: usize, b: usize, class: EdgeClass) {
        let idx = self.index(a, b);
        self.classes[idx] = if a < b { class } else { class.reversed() };
    }

    pub fn is_known(&self, from: usize, to: usize) -> bool {
        self.class(from, to) == EdgeClass::Known(Dir::Forward)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.class(a, b) == EdgeClass::Adjacent
    }

    pub fn is_absent(&self, a: usize, b: usize) -> bool {
        self.class(a, b) == EdgeClass::Absent
    }

    /// All pairs `(lo, hi, class)` with the class relative to `lo -> hi`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, EdgeClass)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
            .zip(self.classes.iter())
            .map(|((a, b), &c)| (a, b, c))
    }

    /// Known edges as `(from, to)`.
    pub fn known_edges(&self) -> Vec<(usize, usize)> {
        self.oriented(|c| matches!(c, EdgeClass::Known(_)))
    }

    /// Semi-directed candidates as `(from, to)`.
    pub fn semidirected_edges(&self) -> Vec<(usize, usize)> {
        self.oriented(|c| matches!(c, EdgeClass::SemiDirected(_)))
    }

    fn oriented(&self, pick: impl Fn(EdgeClass) -> bool) -> Vec<(usize, usize)> {
        self.pairs()
            .filter(|&(_, _, c)| pick(c))
            .map(|(a, b, c)| match c {
                EdgeClass::Known(Dir::Forward) | EdgeClass::SemiDirected(Dir::Forward) => (a, b),
                _ => (b, a),
            })
            .collect()
    }

    /// Adjacent pairs as `(lo, hi)`.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        self.unordered(EdgeClass::Adjacent)
    }

    /// Unknown pairs as `(lo, hi)`.
    pub fn unknown_pairs(&self) -> Vec<(usize, usize)> {
        self.unordered(EdgeClass::Unknown)
    }

    fn unordered(&self, class: EdgeClass) -> Vec<(usize, usize)> {
        self.pairs()
            .filter(|&(_, _, c)| c == class)
            .map(|(a, b, _)| (a, b))
            .collect()
    }

    /// Count of unresolved pairs (adjacent, semi-directed or unknown), each
    /// unordered pair counted once.
    pub fn ambiguity(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_resolved()).count()
    }

    pub fn is_resolved(&self) -> bool {
        self.ambiguity() == 0
    }

    /// Vertices incident to at least one unresolved pair, ascending.
    pub fn viable_vertices(&self) -> Vec<usize> {
        let mut viable = vec![false; self.n];
        for (a, b, c) in self.pairs() {
            if !c.is_resolved() {
                viable[a] = true;
                viable[b] = true;
            }
        }
        (0..self.n).filter(|&v| viable[v]).collect()
    }

    /// Per-vertex lists of known children.
    pub(crate) fn known_children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.n];
        for (a, b) in self.known_edges() {
            children[a].push(b);
        }
        children
    }

    pub fn check_known_acyclic(&self) -> Result<(), GraphError> {
        match find_cycle(self.n, &self.known_children()) {
            Some(cycle) => Err(GraphError::Cycle { cycle }),
            None => Ok(()),
        }
    }

    /// The DAG formed by the known edges, when the PKG is fully resolved.
    pub fn to_dag(&self) -> Option<Dag> {
        if !self.is_resolved() {
            return None;
        }
        Dag::new(self.n, self.known_edges()).ok()
    }
}

/// Free-function form of [`Pkg::ambiguity`].
pub fn ambiguity(pkg: &Pkg) -> usize {
    pkg.ambiguity()
}
