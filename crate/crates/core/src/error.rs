use std::fmt;

use crate::network::{TerminalSet, Violation};

/// Errors raised by the solver pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Some terminal subset has positive net supply but no path to an
    /// outside sink, so no finite horizon is feasible.
    #[error("no finite feasible time horizon: terminal set {set} has b(S) = {supply} but no outgoing capacity")]
    InfeasibleForever { set: TerminalSet, supply: String },

    #[error("profile was truncated and cannot certify the value at theta = {theta}")]
    TruncatedProfile { theta: String },

    #[error("{what} exceeds the configured cap ({size} > {cap})")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("invalid instance: {}", ViolationList(.0))]
    Invalid(Vec<Violation>),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("horizon {theta} is infeasible")]
    InfeasibleHorizon { theta: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable kind, used in the CLI error document.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InfeasibleForever { .. } => "infeasible-forever",
            Error::TruncatedProfile { .. } => "truncated-profile",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::Invalid(_) => "invalid-instance",
            Error::Malformed(_) => "malformed-document",
            Error::Parameter(_) => "invalid-parameter",
            Error::InfeasibleHorizon { .. } => "infeasible-horizon",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
