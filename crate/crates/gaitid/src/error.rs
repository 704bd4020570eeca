use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A field that does not parse, with its 1-based line number.
    #[error("{}line {line}: {message}", location(path))]
    Parse {
        path: Option<PathBuf>,
        line: u64,
        message: String,
    },

    #[error(
        "{}line {line}: expected {expected} columns, found {found}",
        location(path)
    )]
    Schema {
        path: Option<PathBuf>,
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error(
        "{}line {line}: frame index {next} does not strictly follow {prev}",
        location(path)
    )]
    Ordering {
        path: Option<PathBuf>,
        line: u64,
        prev: u64,
        next: u64,
    },

    #[error(transparent)]
    Core(#[from] gaitid_core::Error),

    #[error("{0}")]
    Usage(String),
}

fn location(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches a file path to parse-type errors that lack one.
    pub fn in_file(self, file: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse {
                path: None,
                line,
                message,
            } => Error::Parse {
                path: Some(file.into()),
                line,
                message,
            },
            Error::Schema {
                path: None,
                line,
                expected,
                found,
            } => Error::Schema {
                path: Some(file.into()),
                line,
                expected,
                found,
            },
            Error::Ordering {
                path: None,
                line,
                prev,
                next,
            } => Error::Ordering {
                path: Some(file.into()),
                line,
                prev,
                next,
            },
            other => other,
        }
    }

    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}
