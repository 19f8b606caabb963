use std::path::PathBuf;

use acadperf_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, AppError>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}, row {row}: {message}", path.display())]
    Row {
        path: PathBuf,
        row: u64,
        message: String,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: CoreError,
    },

    #[error("{0}")]
    Failed(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn row(path: impl Into<PathBuf>, row: u64, message: impl ToString) -> Self {
        AppError::Row {
            path: path.into(),
            row,
            message: message.to_string(),
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        AppError::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn stage(stage: &'static str) -> impl FnOnce(CoreError) -> AppError {
        move |source| AppError::Stage { stage, source }
    }

    /// 2 for bad input or configuration, 1 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Io { .. }
            | AppError::Row { .. }
            | AppError::Format { .. }
            | AppError::Usage(_) => 2,
            AppError::Stage { source, .. } if is_input_error(source) => 2,
            AppError::Stage { .. } | AppError::Failed(_) => 1,
        }
    }
}

fn is_input_error(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::InvalidProfessor { .. }
            | CoreError::InvalidPublication { .. }
            | CoreError::UnknownAuthor { .. }
            | CoreError::CensusBeforeDate { .. }
            | CoreError::InvalidSpan { .. }
            | CoreError::UnresolvedConvention(_)
            | CoreError::MissingScalingCell { .. }
            | CoreError::MissingImpactFactor(_)
            | CoreError::InvalidSpec(_)
            | CoreError::InvalidConfig(_)
            | CoreError::InfeasibleCorrelation { .. }
            | CoreError::InvalidBinWidth(_)
            | CoreError::Parse { .. }
    )
}
