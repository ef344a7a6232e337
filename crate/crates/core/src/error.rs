use thiserror::Error;

/// Errors raised while talking to an archive (live or fixture-backed).
#[derive(Debug, Error)]
pub enum ArchiveError {
    /// The archive has no timemap for the resource (404-equivalent).
    /// Callers map this to a not-archived resolution.
    #[error("no timemap found for {uri}")]
    TimemapNotFound { uri: String },

    /// Network-level or server-side failure; retrying may succeed.
    #[error("transient failure fetching {uri}: {reason}")]
    Transient { uri: String, reason: String },

    #[error("malformed link-format timemap: {0}")]
    MalformedTimemap(String),

    #[error("malformed header block: {0}")]
    MalformedHeaders(String),

    #[error("redirect limit exceeded fetching {0}")]
    RedirectLoop(String),

    #[error("URI is not in rewritten replay form: {0}")]
    NonRewrittenUri(String),

    #[error("invalid archive source configuration: {0}")]
    Config(String),

    #[error("invalid fixture store entry: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ArchiveError {
    /// True for failures where a retry could plausibly succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, ArchiveError::Transient { .. })
    }
}

/// Errors raised while constructing domain values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("URI is not absolute (missing scheme or host): {0}")]
    NotAbsoluteUri(String),

    #[error("invalid similarity policy: {0}")]
    InvalidPolicy(String),
}

/// Errors raised by the recomposition pipeline.
#[derive(Debug, Error)]
pub enum RecomposeError {
    /// The root URI-R has no mementos at all; nothing can be recomposed.
    #[error("root resource is not archived: {uri}")]
    RootNotArchived { uri: String },

    /// The root timemap exists but no root memento could be retrieved.
    #[error("root memento could not be retrieved for {uri}: {reason}")]
    RootUnretrievable { uri: String, reason: String },

    #[error("unknown selection heuristic: {0}")]
    UnknownHeuristic(String),

    #[error("invalid recomposition limits: {0}")]
    InvalidLimits(String),

    #[error(transparent)]
    Archive(#[from] ArchiveError),

    #[error(transparent)]
    Model(#[from] ModelError),
}
