use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Estimate,
    Agents,
    Anneal,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Estimate => "estimate",
            Stage::Agents => "agents",
            Stage::Anneal => "anneal",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed CSV: {reason}", path.display())]
    MalformedCsv { path: PathBuf, reason: String },
    #[error("{}: non-positive close {value} for {asset} on line {line}", path.display())]
    NonPositivePrice { path: PathBuf, asset: String, line: u64, value: f64 },
    #[error("{}: dates not strictly increasing at {date}", path.display())]
    NonMonotonicDates { path: PathBuf, date: String },
    #[error("dates of {asset} do not match those of {reference}")]
    DateMisalignment { asset: String, reference: String },
    #[error("{}: {reason}", path.display())]
    SchemaMismatch { path: PathBuf, reason: String },
    #[error("{}: {reason}", path.display())]
    IoFailure { path: PathBuf, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cga_core::Error),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Core(cga_core::Error::BadConfig(_)))
    }

    /// Process exit status: 1 for configuration errors, 2 for failures while running a stage.
    pub fn exit_code(&self) -> u8 {
        if self.is_config() {
            1
        } else {
            2
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| match e.into() {
            e @ Error::Stage { .. } => e,
            e if e.is_config() => e,
            e => Error::Stage { stage, source: Box::new(e) },
        })
    }
}
