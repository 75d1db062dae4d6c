use vga_core::dataset::DatasetError;
use vga_core::models::ModelError;
use vga_core::procedure::ProcedureError;

/// Exit codes of the `vga` binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    UnknownDmu(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            _ => EXIT_VALIDATION,
        }
    }

    /// HTTP status used by the service.
    pub fn status(&self) -> u16 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) | CliError::Io(_) => 400,
            CliError::UnknownDmu(_) | CliError::NotFound(_) => 404,
            CliError::Conflict(_) => 409,
            CliError::Solver(_) => 422,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::UnknownDmu(_) => CliError::UnknownDmu(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Dataset(d) => d.into(),
            ModelError::InvalidKappa(_) | ModelError::InvalidBounds(_) => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<ProcedureError> for CliError {
    fn from(e: ProcedureError) -> Self {
        match e {
            ProcedureError::Model(m) => m.into(),
            ProcedureError::OutOfOrder { .. } | ProcedureError::Finished | ProcedureError::DatasetMismatch { .. } => {
                CliError::Conflict(e.to_string())
            }
            ProcedureError::OutsideInterval { .. }
            | ProcedureError::NotTried(_)
            | ProcedureError::Version(_)
            | ProcedureError::Malformed(_) => CliError::Validation(e.to_string()),
            ProcedureError::AlreadyEfficient(_)
            | ProcedureError::NotEfficient(_)
            | ProcedureError::NoEndpoint(_)
            | ProcedureError::NotBracketed { .. } => CliError::Solver(e.to_string()),
        }
    }
}
