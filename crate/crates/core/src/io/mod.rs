//! JSON artifacts, instance generators and the command-line surface.

pub mod cli;
mod format;
mod generate;

pub use format::{
    parse_allocation, parse_instance, parse_result, serialize_instance, serialize_result, AllocationFile, InstanceFile,
    ResultFile, RunStats, SCHEMA_VERSION,
};
pub use generate::{generate, Family};

use crate::model::ModelError;

/// Where in a document a parse failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}{}", locus(.line, .column, .field))]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

fn locus(line: &Option<usize>, column: &Option<usize>, field: &Option<String>) -> String {
    let mut out = String::new();
    if let Some(f) = field {
        out.push_str(&format!(" (field {f})"));
    }
    if let (Some(l), Some(c)) = (line, column) {
        out.push_str(&format!(" at line {l}, column {c}"));
    }
    out
}

impl ParseError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            column: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    fn json(err: &serde_json::Error) -> Self {
        ParseError {
            line: Some(err.line()),
            column: Some(err.column()),
            field: None,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}
