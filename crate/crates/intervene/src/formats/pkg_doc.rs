use serde::{Deserialize, Serialize};

use intervene_core::{Dag, GraphError, Pkg};

use super::FormatError;

/// A PKG as a document: per-class pair lists, every pair listed nowhere is
/// absent. `known` and `semidirected` pairs are ordered (`[i, j]` is
/// `i -> j`); `adjacent` and `unknown` pairs are written with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PkgDocument {
    pub n: usize,
    #[serde(default)]
    pub known: Vec<[usize; 2]>,
    #[serde(default)]
    pub adjacent: Vec<[usize; 2]>,
    #[serde(default)]
    pub semidirected: Vec<[usize; 2]>,
    #[serde(default)]
    pub unknown: Vec<[usize; 2]>,
}

fn pairs(list: Vec<(usize, usize)>) -> Vec<[usize; 2]> {
    list.into_iter().map(|(a, b)| [a, b]).collect()
}

fn tuples(list: &[[usize; 2]]) -> Vec<(usize, usize)> {
    list.iter().map(|&[a, b]| (a, b)).collect()
}

impl PkgDocument {
    pub fn from_pkg(pkg: &Pkg) -> Self {
        let mut known = pkg.known_edges();
        known.sort_unstable();
        let mut semidirected = pkg.semidirected_edges();
        semidirected.sort_unstable();
        PkgDocument {
            n: pkg.n(),
            known: pairs(known),
            adjacent: pairs(pkg.adjacent_pairs()),
            semidirected: pairs(semidirected),
            unknown: pairs(pkg.unknown_pairs()),
        }
    }

    pub fn to_pkg(&self) -> Result<Pkg, GraphError> {
        Pkg::from_parts(
            self.n,
            &tuples(&self.known),
            &tuples(&self.adjacent),
            &tuples(&self.semidirected),
            &tuples(&self.unknown),
        )
    }

    /// Reads JSON, or TOML when the text does not start with `{`.
    pub fn parse(text: &str) -> Result<Pkg, FormatError> {
        let doc: PkgDocument = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            toml::from_str(text)?
        };
        Ok(doc.to_pkg()?)
    }
}

/// A DAG as a document: vertex count and ordered edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagDocument {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
}

impl DagDocument {
    pub fn from_dag(dag: &Dag) -> Self {
        DagDocument {
            n: dag.n(),
            edges: pairs(dag.edges().to_vec()),
        }
    }

    pub fn to_dag(&self) -> Result<Dag, GraphError> {
        Dag::new(self.n, tuples(&self.edges))
    }
}
