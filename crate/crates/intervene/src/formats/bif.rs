//! Structure-only reader for BIF network files: variable names and parent
//! sets. Types, states and probability tables are skipped.

use std::collections::HashMap;

use intervene_core::Dag;

use super::FormatError;

#[derive(Debug, Clone, PartialEq)]
pub struct BifNetwork {
    pub names: Vec<String>,
    pub dag: Dag,
}

pub fn parse_bif(text: &str) -> Result<BifNetwork, FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut families: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if let Some(rest) = t.strip_prefix("variable ") {
            let name = rest.trim_end_matches('{').trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(FormatError::parse(line, format!("bad variable name {name:?}")));
            }
            if index.insert(name.to_owned(), names.len()).is_some() {
                return Err(FormatError::parse(line, format!("variable {name} declared twice")));
            }
            names.push(name.to_owned());
        } else if let Some(rest) = t.strip_prefix("probability") {
            let open = rest.find('(').ok_or_else(|| FormatError::parse(line, "missing '('"))?;
            let close = rest.find(')').ok_or_else(|| FormatError::parse(line, "missing ')'"))?;
            let inner = &rest[open + 1..close];
            let (child, parents) = match inner.split_once('|') {
                Some((c, p)) => (
                    c,
                    p.split(',')
                        .map(|s| s.trim().to_owned())
                        .filter(|s| !s.is_empty())
                        .collect(),
                ),
                None => (inner, Vec::new()),
            };
            families.push((line, child.trim().to_owned(), parents));
        }
    }
    let lookup = |line: usize, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| FormatError::parse(line, format!("undeclared variable {name}")))
    };
    let mut edges = Vec::new();
    for (line, child, parents) in &families {
        let c = lookup(*line, child)?;
        for p in parents {
            edges.push((lookup(*line, p)?, c));
        }
    }
    Ok(BifNetwork {
        dag: Dag::new(names.len(), edges)?,
        names,
    })
}
