use thiserror::Error;

use crate::dsl::Diagnostic;
use crate::kernel::ModelError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", format_model_errors(.0))]
    Model(Vec<ModelError>),

    #[error("state universe has {size} states, above the cap of {cap} (set STABILIQ_STATE_CAP to raise it)")]
    StateCap { size: u128, cap: u64 },

    #[error("protocol source rejected with {} diagnostic(s): {}", .0.len(), format_diagnostics(.0))]
    Parse(Vec<Diagnostic>),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid mapping: {0}")]
    Mapping(String),

    #[error("invalid specification sets: {0}")]
    Partition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_model_errors(errs: &[ModelError]) -> String {
    errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
