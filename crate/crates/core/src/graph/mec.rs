//! Brute-force Markov equivalence class enumeration. Meant as an oracle for
//! small graphs (roughly `n <= 8`); the search is a backtracking over the
//! orientations of the undirected pairs, pruned on cycles and on new colliders.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::{Dag, Dir, EdgeClass, GraphError, Pkg};

/// Default cap on the number of undirected pairs accepted for enumeration.
pub const DEFAULT_MEC_PAIR_LIMIT: usize = 45;

/// All DAGs represented by an essential-graph PKG: acyclic orientations of
/// the adjacent pairs that keep every known orientation and whose colliders
/// are exactly the colliders already formed by known edges.
pub fn enumerate_mec(pkg: &Pkg) -> Result<Vec<Dag>, GraphError> {
    enumerate_mec_with_limit(pkg, DEFAULT_MEC_PAIR_LIMIT)
}

pub fn enumerate_mec_with_limit(pkg: &Pkg, limit: usize) -> Result<Vec<Dag>, GraphError> {
    if pkg
        .pairs()
        .any(|(_, _, c)| matches!(c, EdgeClass::Unknown | EdgeClass::SemiDirected(_)))
    {
        return Err(GraphError::NotAnEssentialGraph);
    }
    let target = known_colliders(pkg);
    search(pkg, &target, limit)
}

/// Every DAG sharing `dag`'s skeleton and v-structures. Built from the DAG
/// alone, independently of [`cpdag_of`](super::cpdag_of).
pub fn markov_equivalents(dag: &Dag, limit: usize) -> Result<Vec<Dag>, GraphError> {
    let mut pkg = Pkg::absent(dag.n());
    for &(a, b) in dag.edges() {
        pkg.set(a, b, EdgeClass::Adjacent);
    }
    search(&pkg, &dag.v_structures(), limit)
}

fn known_colliders(pkg: &Pkg) -> BTreeSet<(usize, usize, usize)> {
    let n = pkg.n();
    let mut parents = vec![Vec::new(); n];
    for (a, b) in pkg.known_edges() {
        parents[b].push(a);
    }
    let mut out = BTreeSet::new();
    for (c, pa) in parents.iter().enumerate() {
        for (i, &a) in pa.iter().enumerate() {
            for &b in &pa[i + 1..] {
                if pkg.is_absent(a, b) {
                    out.insert((a.min(b), c, a.max(b)));
                }
            }
        }
    }
    out
}

struct Search<'a> {
    pkg: &'a Pkg,
    target: &'a BTreeSet<(usize, usize, usize)>,
    free: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    colliders: usize,
    out: Vec<Dag>,
}

fn search(pkg: &Pkg, target: &BTreeSet<(usize, usize, usize)>, limit: usize) -> Result<Vec<Dag>, GraphError> {
    let n = pkg.n();
    let free = pkg.adjacent_pairs();
    if free.len() > limit {
        return Err(GraphError::TooLarge {
            pairs: free.len(),
            limit,
        });
    }
    let mut s = Search {
        pkg,
        target,
        free,
        parents: vec![Vec::new(); n],
        children: vec![Vec::new(); n],
        colliders: 0,
        out: Vec::new(),
    };
    for (a, b) in pkg.known_edges() {
        if s.add(a, b).0.is_none() {
            return Ok(Vec::new());
        }
    }
    s.descend(0);
    Ok(s.out)
}

impl Search<'_> {
    /// Adds `a -> b`. Returns the number of wanted colliders the edge
    /// completes, or `None` if it closes a cycle or forms an unwanted
    /// collider. The edge is added either way; undo with [`Self::remove`].
    fn add(&mut self, a: usize, b: usize) -> (Option<usize>, usize) {
        let cyclic = self.reaches(b, a);
        self.children[a].push(b);
        self.parents[b].push(a);
        if cyclic {
            return (None, 0);
        }
        let mut counted = 0;
        let mut ok = true;
        for &w in &self.parents[b] {
            if w != a && self.pkg.is_absent(a, w) {
                if self.target.contains(&(a.min(w), b, a.max(w))) {
                    counted += 1;
                } else {
                    ok = false;
                }
            }
        }
        self.colliders += counted;
        (ok.then_some(counted), counted)
    }

    fn remove(&mut self, a: usize, b: usize, counted: usize) {
        self.children[a].pop();
        self.parents[b].pop();
        self.colliders -= counted;
    }

    fn reaches(&self, source: usize, target: usize) -> bool {
        let mut seen = vec![false; self.pkg.n()];
        let mut stack = vec![source];
        while let Some(v) = stack.pop() {
            if v == target {
                return true;
            }
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.free.len() {
            if self.colliders == self.target.len() {
                let edges = self
                    .children
                    .iter()
                    .enumerate()
                    .flat_map(|(a, cs)| cs.iter().map(move |&b| (a, b)));
                self.out
                    .push(Dag::new(self.pkg.n(), edges).expect("search only keeps acyclic orientations"));
            }
            return;
        }
        let (lo, hi) = self.free[depth];
        for dir in [Dir::Forward, Dir::Backward] {
            let (a, b) = match dir {
                Dir::Forward => (lo, hi),
                Dir::Backward => (hi, lo),
            };
            let (ok, counted) = self.add(a, b);
            if ok.is_some() {
                self.descend(depth + 1);
            }
            self.remove(a, b, counted);
        }
    }
}
