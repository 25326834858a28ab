use std::path::PathBuf;

use thiserror::Error;

/// Command failures, each with a fixed process exit code.
///
/// | code | meaning |
/// |------|---------|
/// | 1 | usage: bad flags or configuration |
/// | 2 | parse: malformed CSV or JSON |
/// | 3 | range/shape: values out of range, arity or order mismatch |
/// | 4 | schema: unknown model schema or kind |
/// | 5 | numeric degeneracy: zero activation under the reject policy, non-finite weights |
/// | 6 | I/O: unreadable or unwritable file |
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Range { line: usize, message: String },
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse { .. } => 2,
            CliError::Range { .. } | CliError::Shape(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Degenerate(_) => 5,
            CliError::Io { .. } => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<mvqn_core::Error> for CliError {
    fn from(e: mvqn_core::Error) -> Self {
        use mvqn_core::Error as E;
        match e {
            E::DegenerateActivation | E::NonFinite(_) => CliError::Degenerate(e.to_string()),
            E::InvalidConfig(_)
            | E::InvalidRadix(_)
            | E::InvalidQuadrature(_)
            | E::InvalidSpin { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Shape(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
