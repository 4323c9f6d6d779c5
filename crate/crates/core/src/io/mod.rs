//! Graph and symmetry files, and run reports.

pub mod matrix;
pub mod report;
pub mod symmetry_file;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{GraphDescription, GraphError, OpenGraph};
use crate::symmetry::SymmetryError;

pub use report::{canonical_json, sha256_hex, RunReport};
pub use symmetry_file::{RepresentationSpec, SymmetryFile};

/// Malformed input, with the 1-based position reported by the JSON reader.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source_name}:{line}:{column}: {message}")]
pub struct ParseError {
    pub source_name: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn from_json(source_name: &str, e: &serde_json::Error) -> Self {
        ParseError {
            source_name: source_name.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid symmetry data: {0}")]
    Symmetry(#[from] SymmetryError),
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source_name: &str) -> Result<T, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::from_json(source_name, &e))
}

pub fn parse_graph_description(text: &str, source_name: &str) -> Result<GraphDescription, IoError> {
    Ok(parse_json(text, source_name)?)
}

pub fn parse_graph_str(text: &str, source_name: &str) -> Result<OpenGraph, IoError> {
    Ok(OpenGraph::from_description(&parse_graph_description(text, source_name)?)?)
}

pub fn parse_graph_file(path: &Path) -> Result<OpenGraph, IoError> {
    parse_graph_str(&read_text(path)?, &path.display().to_string())
}

/// Pretty JSON form of a graph, readable by [`parse_graph_str`].
pub fn graph_to_json(og: &OpenGraph) -> String {
    serde_json::to_string_pretty(&og.description()).expect("graph descriptions serialize")
}
