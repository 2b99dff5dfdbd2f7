use std::fmt;

/// How a failed run should be reported to the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The inputs are fine but the analysis cannot be carried out.
    Infeasible,
    /// A file, flag or config value could not be understood.
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: FailureKind,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Malformed,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Infeasible,
            message: message.into(),
        }
    }

    /// Prefixes the message, keeping the kind.
    pub fn context(self, what: impl fmt::Display) -> Self {
        Self {
            kind: self.kind,
            message: format!("{what}: {}", self.message),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            FailureKind::Infeasible => 1,
            FailureKind::Malformed => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<hdsurvey::Error> for CliError {
    fn from(e: hdsurvey::Error) -> Self {
        if e.is_input_error() {
            CliError::malformed(e.to_string())
        } else {
            CliError::infeasible(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
