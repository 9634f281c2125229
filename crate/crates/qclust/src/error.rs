use std::path::{Path, PathBuf};

/// Errors from file handling and the command line, wrapping library errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] qclust_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}line {line}: {msg}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse { path: Option<PathBuf>, line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const CONFIG: u8 = 4;
    pub const SIZE_LIMIT: u8 = 5;
    pub const DEGENERATE: u8 = 6;
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: None, line, msg: msg.into() }
    }

    pub(crate) fn in_file(self, file: &Path) -> Self {
        match self {
            Error::Parse { path: None, line, msg } => Error::Parse { path: Some(file.to_path_buf()), line, msg },
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use qclust_core::Error as E;
        match self {
            Error::Usage(_) => exit::USAGE,
            Error::Io { .. } | Error::Parse { .. } => exit::INPUT,
            Error::Core(E::Dimension { .. } | E::Domain(_)) => exit::INPUT,
            Error::Core(E::Config(_)) => exit::CONFIG,
            Error::Core(E::SizeLimit(_)) => exit::SIZE_LIMIT,
            Error::Core(E::Degenerate { .. }) => exit::DEGENERATE,
            Error::Json(_) => exit::OTHER,
        }
    }

    /// Short class name used in benchmark output.
    pub fn class(&self) -> &'static str {
        match self.exit_code() {
            exit::USAGE => "usage",
            exit::INPUT => "input",
            exit::CONFIG => "config",
            exit::SIZE_LIMIT => "size_limit",
            exit::DEGENERATE => "degenerate",
            _ => "other",
        }
    }
}
