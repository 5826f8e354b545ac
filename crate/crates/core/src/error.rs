use thiserror::Error;

use crate::diag::Diagnostic;
use crate::model::Id;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input does not validate ({} diagnostic(s)); first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Invalid(Vec<Diagnostic>),
    #[error("{0} is not a let-binding of the term")]
    UnknownLet(Id),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("port {0} has no corresponding field")]
    MissingField(Id),
    #[error("step limit of {limit} exceeded")]
    StepLimit { limit: usize, partial: Box<crate::rewrite::RewriteResult> },
    #[error("cannot decode at {component}: {reason}")]
    Decode { component: String, reason: String },
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Parse(#[from] crate::textio::ParseError),
}

impl Error {
    pub(crate) fn decode(component: impl ToString, reason: impl Into<String>) -> Self {
        Error::Decode { component: component.to_string(), reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
