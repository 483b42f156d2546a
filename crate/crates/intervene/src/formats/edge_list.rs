//! Plain edge lists: one `from to` pair per line, `#` comments, blank lines
//! ignored. Two comment forms carry metadata: `# n=K` fixes the vertex
//! count (so trailing isolated vertices survive a round trip) and
//! `# names: a b c` labels the vertices.

use std::fmt::Write as _;

use intervene_core::Dag;

use super::FormatError;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub dag: Dag,
    pub names: Option<Vec<String>>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList, FormatError> {
    let mut declared: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let (body, comment) = match raw.find('#') {
            Some(at) => (&raw[..at], Some(raw[at + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(v) = c.strip_prefix("n=") {
                declared = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| FormatError::parse(line, format!("bad vertex count {v:?}")))?,
                );
            } else if let Some(v) = c.strip_prefix("names:") {
                names = Some(v.split_whitespace().map(str::to_owned).collect());
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [a, b] => {
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| FormatError::parse(line, format!("{s:?} is not a vertex index")))
                };
                edges.push((parse(a)?, parse(b)?));
            }
            _ => {
                return Err(FormatError::parse(
                    line,
                    format!("expected two indices, got {:?}", body.trim()),
                ))
            }
        }
    }
    let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let n = declared.or(names.as_ref().map(Vec::len)).unwrap_or(inferred);
    if let Some(names) = &names {
        if names.len() != n {
            return Err(FormatError::parse(0, format!("{} names for {n} vertices", names.len())));
        }
    }
    Ok(EdgeList {
        dag: Dag::new(n, edges)?,
        names,
    })
}

pub fn load_edge_list(text: &str) -> Result<Dag, FormatError> {
    parse_edge_list(text).map(|e| e.dag)
}

pub fn save_edge_list(dag: &Dag) -> String {
    save_named_edge_list(dag, None)
}

pub fn save_named_edge_list(dag: &Dag, names: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(names) = names {
        let _ = writeln!(out, "# names: {}", names.join(" "));
    }
    let _ = writeln!(out, "# n={}", dag.n());
    for &(a, b) in dag.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}
