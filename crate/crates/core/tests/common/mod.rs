#![allow(dead_code)]

use std::collections::BTreeSet;

use intervene_core::graph::{Dag, Dir, EdgeClass, Pkg};
use intervene_core::rng::{seeded, Rng};
use rand::seq::SliceRandom;
use rand::Rng as _;

pub fn rng(seed: u64) -> Rng {
    seeded(seed)
}

/// Random DAG with vertex labels shuffled, so edges do not all point from
/// lower to higher indices.
pub fn random_dag(rng: &mut Rng, n: usize, p: f64) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(n, edges).unwrap()
}

/// Every DAG with `dag`'s skeleton and v-structures, by trying all
/// orientations of the skeleton.
pub fn brute_equivalents(dag: &Dag) -> Vec<Dag> {
    let skeleton: Vec<(usize, usize)> = dag.skeleton().into_iter().collect();
    assert!(skeleton.len() <= 16, "too many edges for exhaustive orientation");
    let target = dag.v_structures();
    let mut out = Vec::new();
    for mask in 0u32..(1 << skeleton.len()) {
        let edges = skeleton
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| if mask >> k & 1 == 1 { (b, a) } else { (a, b) });
        if let Ok(d) = Dag::new(dag.n(), edges) {
            if d.v_structures() == target {
                out.push(d);
            }
        }
    }
    out
}

/// Whether the truth is one of the DAGs `pkg` still allows.
pub fn consistent(pkg: &Pkg, truth: &Dag) -> bool {
    pkg.pairs().all(|(a, b, class)| {
        let fwd = truth.has_edge(a, b);
        let bwd = truth.has_edge(b, a);
        match class {
            EdgeClass::Known(Dir::Forward) => fwd,
            EdgeClass::Known(Dir::Backward) => bwd,
            EdgeClass::Adjacent => fwd || bwd,
            EdgeClass::SemiDirected(Dir::Forward) => !bwd,
            EdgeClass::SemiDirected(Dir::Backward) => !fwd,
            EdgeClass::Unknown => true,
            EdgeClass::Absent => !fwd && !bwd,
        }
    })
}

/// Starts from full knowledge of `truth` and forgets information at random:
/// absent pairs become unknown or semi-directed either way, known edges
/// become semi-directed the true way, adjacent pairs become unknown.
pub fn masked_pkg(truth: &Dag, base: &Pkg, rng: &mut Rng, forget: f64) -> Pkg {
    let mut pkg = base.clone();
    let pairs: Vec<(usize, usize, EdgeClass)> = pkg.pairs().collect();
    for (a, b, class) in pairs {
        if !rng.gen_bool(forget) {
            continue;
        }
        let new = match class {
            EdgeClass::Absent => {
                if rng.gen_bool(0.5) {
                    EdgeClass::Unknown
                } else if rng.gen_bool(0.5) {
                    EdgeClass::SemiDirected(Dir::Forward)
                } else {
                    EdgeClass::SemiDirected(Dir::Backward)
                }
            }
            EdgeClass::Known(d) => EdgeClass::SemiDirected(d),
            EdgeClass::Adjacent => EdgeClass::Unknown,
            other => other,
        };
        pkg.set(a, b, new);
    }
    debug_assert!(consistent(&pkg, truth));
    pkg
}

/// Arbitrary PKG; known edges point from lower to higher index so it is
/// always acyclic.
pub fn random_pkg(rng: &mut Rng, n: usize) -> Pkg {
    let mut pkg = Pkg::absent(n);
    for a in 0..n {
        for b in a + 1..n {
            let class = match rng.gen_range(0..7) {
                0 => EdgeClass::Known(Dir::Forward),
                1 => EdgeClass::Adjacent,
                2 => EdgeClass::SemiDirected(Dir::Forward),
                3 => EdgeClass::SemiDirected(Dir::Backward),
                4 | 5 => EdgeClass::Unknown,
                _ => EdgeClass::Absent,
            };
            pkg.set(a, b, class);
        }
    }
    pkg
}

pub fn subsets_up_to(items: &[usize], k: usize) -> Vec<BTreeSet<usize>> {
    (0u64..(1 << items.len()))
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..items.len()).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}
