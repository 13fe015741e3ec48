use std::fmt;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: &'static str,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {}", join_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{0}")]
    Domain(String),

    #[error("MMSE-type receiver is undefined without jamming data power (q_j = 0)")]
    MmseUndefined,

    #[error("correlation estimates unavailable: p_j * beta_j is zero")]
    EstimationUnavailable,

    #[error("all receive filters were zero; SINR denominator is degenerate")]
    DegenerateFilter,

    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config(vec![ConfigIssue::new(field, message)])
    }

    pub fn io(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::MmseUndefined | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
