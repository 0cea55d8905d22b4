use quasi2d_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The scenario or an argument is malformed; exit code 2.
    #[error("validation failed: `{field}` {reason}")]
    Validation { field: String, reason: String },

    /// A model or fit failed while running; exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(CoreError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig { field, reason } => CliError::validation(field, reason),
            CoreError::Unsupported(msg) => CliError::validation("mode", msg),
            CoreError::DegenerateLattice { alpha } => {
                CliError::validation("alpha", format!("gives a degenerate lattice at {alpha} rad"))
            }
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
