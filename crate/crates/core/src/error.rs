use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn at_line(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!("line {n}: "),
        None => String::new(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("stream write failure: {0}")]
    Write(#[source] io::Error),

    #[error("missing input: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("{}{msg}", at_line(line))]
    Parse { line: Option<usize>, msg: String },

    #[error("line count mismatch at line {0}")]
    LineMismatch(usize),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("unprojectable sentence: {0}")]
    Unprojectable(String),

    #[error("no scoreable tokens")]
    NoScoreableTokens,

    #[error("mismatched testsets: {0} vs {1}")]
    TestsetMismatch(String, String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            msg: msg.into(),
        }
    }

    pub(crate) fn parse_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line: Some(line),
            msg: msg.into(),
        }
    }

    /// Attach a 1-based line number to a parse error that lacks one.
    pub(crate) fn at(self, line: usize) -> Self {
        match self {
            Error::Parse { line: None, msg } => Error::Parse { line: Some(line), msg },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            Error::MissingInput(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// Process exit status for this error: 2 for usage and validation
    /// problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Write(_) => 1,
            _ => 2,
        }
    }
}
