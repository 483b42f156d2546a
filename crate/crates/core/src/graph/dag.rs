use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::GraphError;

/// A directed acyclic graph over vertices `0..n`.
///
/// Edges are stored sorted and deduplicated; construction goes through
/// [`Dag::new`], which rejects self-loops, duplicate or antiparallel edges,
/// out-of-range indices and cycles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (from, to) in edges {
            for v in [from, to] {
                if v >= n {
                    return Err(GraphError::Index { vertex: v, n });
                }
            }
            if from == to {
                return Err(GraphError::SelfLoop { vertex: from });
            }
            if !seen.insert((from, to)) {
                return Err(GraphError::DuplicateEdge { from, to });
            }
            if seen.contains(&(to, from)) {
                return Err(GraphError::Cycle { cycle: vec![from, to] });
            }
            parents[to].push(from);
            children[from].push(to);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            n,
            edges: seen.into_iter().collect(),
            parents,
            children,
        };
        if let Some(cycle) = find_cycle(n, &dag.children) {
            return Err(GraphError::Cycle { cycle });
        }
        Ok(dag)
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Dag {
            n,
            edges: Vec::new(),
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges `(from, to)` in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from < self.n && self.children[from].binary_search(&to).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Number of skeleton neighbours of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.parents[v].len() + self.children[v].len()
    }

    /// Unordered adjacent pairs `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect()
    }

    /// Colliders `a -> c <- b` with `a` and `b` non-adjacent, reported as
    /// `(a, c, b)` with `a < b`.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.n {
            let pa = &self.parents[c];
            for (x, &a) in pa.iter().enumerate() {
                for &b in &pa[x + 1..] {
                    if !self.adjacent(a, b) {
                        out.insert((a, c, b));
                    }
                }
            }
        }
        out
    }

    /// A topological order (Kahn's algorithm, smallest index first).
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }
}

/// Validates an edge list and returns the DAG it describes.
pub fn validate_dag(n: usize, edges: &[(usize, usize)]) -> Result<Dag, GraphError> {
    Dag::new(n, edges.iter().copied())
}

/// Returns one directed cycle (as a vertex sequence) if the adjacency lists
/// contain any.
pub(crate) fn find_cycle(n: usize, children: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&c) = children[v].get(*next) {
                *next += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        parent[c] = v;
                        stack.push((c, 0));
                    }
                    1 => {
                        let mut cycle = vec![c];
                        let mut cur = v;
                        while cur != c {
                            cycle.push(cur);
                            cur = parent[cur];
                        }
                        cycle[1..].reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}
