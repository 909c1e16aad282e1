//! Error records and exit codes.

use serde::Serialize;
use sobolab_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Validation,
    Computation,
    Io,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Failure {
        Failure { kind: FailureKind::Validation, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Failure {
        Failure { kind: FailureKind::Io, message: message.into() }
    }

    pub fn from_core(e: Error) -> Failure {
        let kind = match e {
            Error::InvalidSpec(_)
            | Error::UnknownFamily(_)
            | Error::FeatureDisabled(_)
            | Error::SizeLimit { .. }
            | Error::NonAbelian
            | Error::InvalidParams(_)
            | Error::InvalidArgument(_)
            | Error::NegativeTime(_) => FailureKind::Validation,
            _ => FailureKind::Computation,
        };
        Failure { kind, message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Validation => 2,
            FailureKind::Computation | FailureKind::Io => 1,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::from_core(e)
    }
}
