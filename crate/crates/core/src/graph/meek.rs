//! Meek's orientation rules R1-R4, applied to a fixpoint.
//!
//! Premises that need an edge match only known edges (directed premises) or
//! adjacent pairs (undirected premises); premises that need non-adjacency
//! match only absent pairs. Unknown and semi-directed pairs block every rule.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{Dir, EdgeClass, GraphError, Pkg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MeekRule {
    R1,
    R2,
    R3,
    R4,
}

/// One orientation added by the closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeekOrientation {
    pub from: usize,
    pub to: usize,
    pub rule: MeekRule,
}

/// Applies R1-R4 until none fires. Only adjacent pairs change (to known).
pub fn meek_closure(pkg: &Pkg) -> Result<Pkg, GraphError> {
    Closure::new(pkg)?.run(None).map(|(p, _)| p)
}

/// Like [`meek_closure`], also reporting which rule oriented each edge.
pub fn meek_closure_traced(pkg: &Pkg) -> Result<(Pkg, Vec<MeekOrientation>), GraphError> {
    Closure::new(pkg)?.run(None)
}

/// Closure with the worklist drained in random order. The fixpoint does not
/// depend on the order; this entry point exists to check exactly that.
pub fn meek_closure_shuffled(pkg: &Pkg, rng: &mut dyn RngCore) -> Result<Pkg, GraphError> {
    Closure::new(pkg)?.run(Some(rng)).map(|(p, _)| p)
}

struct Closure {
    pkg: Pkg,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
    undirected: Vec<BTreeSet<usize>>,
}

impl Closure {
    fn new(pkg: &Pkg) -> Result<Self, GraphError> {
        pkg.check_known_acyclic()?;
        let n = pkg.n();
        let mut parents = vec![BTreeSet::new(); n];
        let mut children = vec![BTreeSet::new(); n];
        let mut undirected = vec![BTreeSet::new(); n];
        for (a, b, c) in pkg.pairs() {
            match c {
                EdgeClass::Known(Dir::Forward) => {
                    children[a].insert(b);
                    parents[b].insert(a);
                }
                EdgeClass::Known(Dir::Backward) => {
                    children[b].insert(a);
                    parents[a].insert(b);
                }
                EdgeClass::Adjacent => {
                    undirected[a].insert(b);
                    undirected[b].insert(a);
                }
                _ => {}
            }
        }
        Ok(Closure {
            pkg: pkg.clone(),
            parents,
            children,
            undirected,
        })
    }

    fn run(mut self, mut rng: Option<&mut dyn RngCore>) -> Result<(Pkg, Vec<MeekOrientation>), GraphError> {
        let n = self.pkg.n();
        let mut queued = vec![false; super::pair_count(n)];
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        for a in 0..n {
            for &b in self.undirected[a].range(a + 1..) {
                queued[self.pkg.index(a, b)] = true;
                queue.push_back((a, b));
            }
        }
        let mut trace = Vec::new();
        loop {
            let next = match rng.as_deref_mut() {
                Some(r) if !queue.is_empty() => {
                    let k = r.gen_range(0..queue.len());
                    queue.swap_remove_back(k)
                }
                _ => queue.pop_front(),
            };
            let Some((a, b)) = next else { break };
            queued[self.pkg.index(a, b)] = false;
            if !self.undirected[a].contains(&b) {
                continue;
            }
            let flip = rng.as_deref_mut().is_some_and(|r| r.gen_bool(0.5));
            let (x, y) = if flip { (b, a) } else { (a, b) };
            let found = self
                .rule_for(x, y)
                .map(|rule| (x, y, rule))
                .or_else(|| self.rule_for(y, x).map(|rule| (y, x, rule)));
            let Some((from, to, rule)) = found else { continue };
            self.orient(from, to)?;
            trace.push(MeekOrientation { from, to, rule });

            // Premises of any rule for a pair touch only vertices within one
            // step of its endpoints, so requeue around both endpoints.
            let mut around: BTreeSet<usize> = BTreeSet::new();
            for v in [from, to] {
                around.insert(v);
                around.extend(self.neighbours(v));
            }
            for &v in &around {
                for &w in &self.undirected[v] {
                    let idx = self.pkg.index(v, w);
                    if !queued[idx] {
                        queued[idx] = true;
                        queue.push_back((v.min(w), v.max(w)));
                    }
                }
            }
        }
        Ok((self.pkg, trace))
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents[v]
            .iter()
            .chain(self.children[v].iter())
            .chain(self.undirected[v].iter())
            .copied()
    }

    /// The first rule that orients the adjacent pair as `x -> y`.
    fn rule_for(&self, x: usize, y: usize) -> Option<MeekRule> {
        let absent = |a: usize, b: usize| self.pkg.is_absent(a, b);
        // R1: a -> x, x - y, a and y non-adjacent
        if self.parents[x].iter().any(|&a| a != y && absent(a, y)) {
            return Some(MeekRule::R1);
        }
        // R2: x -> k -> y
        if self.children[x].iter().any(|k| self.parents[y].contains(k)) {
            return Some(MeekRule::R2);
        }
        // R3: x - k, x - l, k -> y, l -> y, k and l non-adjacent
        let mids: Vec<usize> = self.undirected[x]
            .iter()
            .copied()
            .filter(|k| self.parents[y].contains(k))
            .collect();
        for (i, &k) in mids.iter().enumerate() {
            if mids[i + 1..].iter().any(|&l| absent(k, l)) {
                return Some(MeekRule::R3);
            }
        }
        // R4: x - d, d -> b, b -> y, x - b, d and y non-adjacent
        for &d in &self.undirected[x] {
            if d == y || !absent(d, y) {
                continue;
            }
            if self.children[d]
                .iter()
                .any(|b| self.parents[y].contains(b) && self.undirected[x].contains(b))
            {
                return Some(MeekRule::R4);
            }
        }
        None
    }

    fn orient(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        if self.reaches(to, from) {
            return Err(GraphError::InconsistentPkg { from, to });
        }
        self.undirected[from].remove(&to);
        self.undirected[to].remove(&from);
        self.children[from].insert(to);
        self.parents[to].insert(from);
        self.pkg.set(from, to, EdgeClass::Known(Dir::Forward));
        Ok(())
    }

    fn reaches(&self, source: usize, target: usize) -> bool {
        let mut seen = vec![false; self.pkg.n()];
        let mut stack = vec![source];
        seen[source] = true;
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn pkg(n: usize, known: &[(usize, usize)], adjacent: &[(usize, usize)]) -> Pkg {
        Pkg::from_parts(n, known, adjacent, &[], &[]).unwrap()
    }

    #[test]
    fn r1_orients_away_from_known_arrow() {
        let (out, trace) = meek_closure_traced(&pkg(3, &[(0, 1)], &[(1, 2)])).unwrap();
        assert!(out.is_known(1, 2));
        assert_eq!(
            trace,
            vec![MeekOrientation {
                from: 1,
                to: 2,
                rule: MeekRule::R1
            }]
        );
    }

    #[test]
    fn r2_closes_directed_path() {
        let (out, trace) = meek_closure_traced(&pkg(3, &[(0, 1), (1, 2)], &[(0, 2)])).unwrap();
        assert!(out.is_known(0, 2));
        assert_eq!(trace[0].rule, MeekRule::R2);
    }

    #[test]
    fn all_absent_is_unchanged() {
        let p = Pkg::absent(5);
        assert_eq!(meek_closure(&p).unwrap(), p);
    }

    #[test]
    fn r3_star() {
        // i = 0, j = 1, k = 2, l = 3
        let p = pkg(4, &[(2, 1), (3, 1)], &[(0, 2), (0, 3), (0, 1)]);
        let (out, trace) = meek_closure_traced(&p).unwrap();
        assert!(out.is_known(0, 1));
        assert_eq!(
            trace,
            vec![MeekOrientation {
                from: 0,
                to: 1,
                rule: MeekRule::R3
            }]
        );
        // the two spokes stay undirected
        assert!(out.is_adjacent(0, 2) && out.is_adjacent(0, 3));
    }

    #[test]
    fn r4_chain() {
        // i = 0, j = 1, b = 2, d = 3: d -> b -> j, i - d, i - b, i - j, d and j absent
        let p = pkg(4, &[(3, 2), (2, 1)], &[(0, 3), (0, 2), (0, 1)]);
        let (out, trace) = meek_closure_traced(&p).unwrap();
        assert!(out.is_known(0, 1));
        assert_eq!(trace[0].rule, MeekRule::R4);
    }

    #[test]
    fn unknown_pair_blocks_r1() {
        let p = Pkg::from_parts(3, &[(0, 1)], &[(1, 2)], &[], &[(0, 2)]).unwrap();
        assert_eq!(meek_closure(&p).unwrap(), p);
        let p = Pkg::from_parts(3, &[(0, 1)], &[(1, 2)], &[(0, 2)], &[]).unwrap();
        assert_eq!(meek_closure(&p).unwrap(), p);
    }

    #[test]
    fn forced_cycle_is_inconsistent() {
        // R1 from 3 -> 0 orients 0 -> 1; with 1 -> 2 -> 0 known that is a cycle
        let p = pkg(4, &[(3, 0), (1, 2), (2, 0)], &[(0, 1)]);
        assert!(matches!(meek_closure(&p), Err(GraphError::InconsistentPkg { .. })));
    }

    #[test]
    fn cyclic_input_is_rejected() {
        let mut p = Pkg::absent(3);
        p.set(0, 1, EdgeClass::Known(Dir::Forward));
        p.set(1, 2, EdgeClass::Known(Dir::Forward));
        p.set(2, 0, EdgeClass::Known(Dir::Forward));
        assert!(matches!(meek_closure(&p), Err(GraphError::Cycle { .. })));
    }

    #[test]
    fn shuffled_matches_default_on_long_chain() {
        let n = 12;
        let adjacent: Vec<(usize, usize)> = (1..n - 1).map(|v| (v, v + 1)).collect();
        let p = pkg(n, &[(0, 1)], &adjacent);
        let base = meek_closure(&p).unwrap();
        assert!(base.is_resolved());
        for seed in 0..20 {
            let mut rng = seeded(seed);
            assert_eq!(meek_closure_shuffled(&p, &mut rng).unwrap(), base);
        }
    }
}
