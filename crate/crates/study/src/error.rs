use thiserror::Error;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("unknown study {0:?}")]
    UnknownStudy(String),
    #[error("unknown annotator {0:?}")]
    UnknownUser(String),
    #[error("unknown image {0:?}")]
    UnknownImage(String),
    #[error("study {0:?} already exists")]
    DuplicateStudy(String),
    #[error("invalid study definition: {0}")]
    InvalidDefinition(String),
    #[error("invalid label {0:?}: expected \"real\" or \"fake\"")]
    InvalidLabel(String),
    #[error("image {image_id:?} is already labeled")]
    AlreadyLabeled { image_id: String },
    #[error("image {image_id:?} is leased to another annotator")]
    LeaseConflict { image_id: String },
    #[error("admin token required")]
    Forbidden,
    #[error("log line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl StudyError {
    /// Stable machine-readable code used in HTTP error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            StudyError::UnknownStudy(_) => "unknown_study",
            StudyError::UnknownUser(_) => "unknown_user",
            StudyError::UnknownImage(_) => "unknown_image",
            StudyError::DuplicateStudy(_) => "duplicate_study",
            StudyError::InvalidDefinition(_) => "invalid_definition",
            StudyError::InvalidLabel(_) => "invalid_label",
            StudyError::AlreadyLabeled { .. } => "already_labeled",
            StudyError::LeaseConflict { .. } => "lease_conflict",
            StudyError::Forbidden => "forbidden",
            StudyError::CorruptLog { .. } => "corrupt_log",
            StudyError::Io(_) => "io",
        }
    }
}

pub type Result<T, E = StudyError> = std::result::Result<T, E>;
