use super::{meek_closure, Dag, Dir, EdgeClass, Pkg};

/// Essential graph (CPDAG) of `dag` as a PKG: v-structure edges and every
/// edge Meek's rules can derive from them are known, the rest of the skeleton
/// is adjacent, non-edges are absent.
pub fn cpdag_of(dag: &Dag) -> Pkg {
    let mut pkg = Pkg::absent(dag.n());
    for &(a, b) in dag.edges() {
        pkg.set(a, b, EdgeClass::Adjacent);
    }
    for (a, c, b) in dag.v_structures() {
        pkg.set(a, c, EdgeClass::Known(Dir::Forward));
        pkg.set(b, c, EdgeClass::Known(Dir::Forward));
    }
    // orientations are a subset of an acyclic graph, so the closure cannot fail
    meek_closure(&pkg).expect("v-structure orientations of a DAG are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_dag;

    #[test]
    fn collider_is_fully_known() {
        let p = cpdag_of(&validate_dag(3, &[(0, 2), (1, 2)]).unwrap());
        assert!(p.is_known(0, 2) && p.is_known(1, 2) && p.is_absent(0, 1));
        assert!(p.is_resolved());
    }

    #[test]
    fn chain_is_undirected() {
        let p = cpdag_of(&validate_dag(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(p.adjacent_pairs(), [(0, 1), (1, 2)]);
        assert_eq!(p.ambiguity(), 2);
    }

    #[test]
    fn single_edge_is_undirected() {
        let p = cpdag_of(&validate_dag(2, &[(0, 1)]).unwrap());
        assert_eq!(p.adjacent_pairs(), [(0, 1)]);
    }

    #[test]
    fn collider_propagates_downstream() {
        // 0 -> 2 <- 1, 2 - 3 gets oriented by R1
        let p = cpdag_of(&validate_dag(4, &[(0, 2), (1, 2), (2, 3)]).unwrap());
        assert!(p.is_known(2, 3));
    }
}
