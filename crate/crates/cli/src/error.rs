use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Game-file problem; line 0 means the file as a whole.
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{path}: {source}")]
    File { path: String, source: Box<CliError> },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] aggregation_games::Error),
}
