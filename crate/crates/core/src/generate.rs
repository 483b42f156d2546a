//! Random ground-truth DAGs and structural statistics.

use rand::Rng as _;

use crate::graph::Dag;
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("edge probability must lie in [0, 1], got {0}")]
    Probability(f64),
}

/// Erdős–Rényi DAG: each pair `i < j` independently gets the edge `i -> j`
/// with probability `p`. The same `(n, p, seed)` always yields the same
/// graph.
pub fn erdos_renyi_dag(n: usize, p: f64, seed: u64) -> Result<Dag, GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::Probability(p));
    }
    let mut rng = seeded(seed);
    let mut edges = alloc::vec::Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Dag::new(n, edges).expect("forward edges form a DAG"))
}

/// Size and degree summary of a DAG. `degree_std` is the sample standard
/// deviation (zero below two vertices).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub degree_std: f64,
    pub v_structures: usize,
}

pub fn structural_stats(dag: &Dag) -> GraphStats {
    let n = dag.n();
    let degrees = (0..n).map(|v| dag.degree(v));
    let avg = if n == 0 {
        0.0
    } else {
        2.0 * dag.edge_count() as f64 / n as f64
    };
    let std = if n < 2 {
        0.0
    } else {
        let ss: f64 = degrees.clone().map(|d| (d as f64 - avg) * (d as f64 - avg)).sum();
        libm::sqrt(ss / (n - 1) as f64)
    };
    GraphStats {
        nodes: n,
        edges: dag.edge_count(),
        min_degree: degrees.clone().min().unwrap_or(0),
        max_degree: degrees.max().unwrap_or(0),
        avg_degree: avg,
        degree_std: std,
        v_structures: dag.v_structures().len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        assert_eq!(erdos_renyi_dag(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi_dag(6, 1.0, 1).unwrap().edge_count(), 15);
        assert!(erdos_renyi_dag(3, 1.5, 1).is_err());
        assert!(erdos_renyi_dag(3, f64::NAN, 1).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(erdos_renyi_dag(12, 0.3, 9), erdos_renyi_dag(12, 0.3, 9));
    }

    #[test]
    fn collider_stats() {
        let dag = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let s = structural_stats(&dag);
        assert_eq!(
            (s.nodes, s.edges, s.min_degree, s.max_degree, s.v_structures),
            (3, 2, 1, 2, 1)
        );
        assert!((s.avg_degree - 4.0 / 3.0).abs() < 1e-12);
        // degrees 1, 1, 2 around 4/3: (1/9 + 1/9 + 4/9) / 2
        assert!((s.degree_std - libm::sqrt(1.0 / 3.0)).abs() < 1e-12);
    }
}
