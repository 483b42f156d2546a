//! On-disk and over-the-wire formats.

mod bif;
mod edge_list;
mod lp;
mod pkg_doc;

pub use bif::{parse_bif, BifNetwork};
pub use edge_list::{load_edge_list, parse_edge_list, save_edge_list, save_named_edge_list, EdgeList};
pub use lp::dump_lp;
pub use pkg_doc::{DagDocument, PkgDocument};

use intervene_core::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl FormatError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }
}
