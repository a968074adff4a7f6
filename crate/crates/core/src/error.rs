use thiserror::Error;

use crate::model::{Diagnostic, ImpactLabel};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown impact label `{0}`")]
    UnknownLabel(String),
    #[error("impact value {0} is outside [0,1]")]
    OutOfRange(f64),
    #[error("value {value} is outside the {label} interval")]
    OutsideLabel { label: ImpactLabel, value: f64 },
}

/// Failure while reading a model, context or scenario document.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("model failed validation: {}", summarize(.0))]
    Semantic(Vec<Diagnostic>),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl ParseError {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn semantic(id: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Semantic(vec![Diagnostic {
            severity: crate::model::Severity::Error,
            id: id.into(),
            message: message.into(),
        }])
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("no feasible authentication configuration in this context")]
    ConfigSpaceEmpty,
    #[error("configuration {0} is not feasible in this context")]
    InfeasibleConfig(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}
