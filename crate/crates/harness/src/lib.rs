//! Instance generators with witnesses, exhaustive verification, fault
//! injection, label-length sweeps and the regression corpus behind the
//! `wmls` command-line tool.

pub mod bench;
pub mod corpus;
pub mod envelope;
pub mod generate;
pub mod schemes;
pub mod verify;

use thiserror::Error;
use wmls_core::mls::LabelError;

pub use envelope::{AnyInstance, Params, Witnessed};
pub use schemes::{BudgetConfig, SchemeKind};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("witness kind mismatch: expected {expected}, found {found}")]
    WitnessKind { expected: &'static str, found: String },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Generate(#[from] generate::GenError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
