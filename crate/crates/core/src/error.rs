use thiserror::Error;

use crate::exact::ExactError;
use crate::instance::InstanceError;
use crate::memetic::DecodeError;
use crate::refine::ChainError;
use crate::tsplib::TsplibError;

/// Umbrella error for the public entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Tsplib(#[from] TsplibError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}
