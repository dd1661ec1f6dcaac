//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalibError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("point ({x}, {lambda}) outside foliated region G")]
    OutsideFoliation { x: f64, lambda: f64 },

    #[error("admissibility error: {0}")]
    Admissibility(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CalibError>;
