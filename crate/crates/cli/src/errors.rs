use serde_json::{json, Value};
use thiserror::Error;

use varpi_core::Error as CoreError;

use crate::schema::{rational_json, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema violation at {pointer}: {detail}")]
    Schema { pointer: String, detail: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for validation and schema failures, 3 for precision exhaustion.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                CoreError::PrecisionExhausted { .. } => 3,
                CoreError::InvalidTower(_)
                | CoreError::Domain { .. }
                | CoreError::BoundViolated { .. }
                | CoreError::InvalidInput(_)
                | CoreError::MissingElement(_) => 2,
                CoreError::TowerMismatch | CoreError::Consistency(_) => 1,
            },
            CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut err = json!({ "message": self.to_string(), "exit_code": self.exit_code() });
        let m = err.as_object_mut().expect("object");
        match self {
            CliError::Schema { pointer, .. } => {
                m.insert("kind".into(), json!("schema"));
                m.insert("pointer".into(), json!(pointer));
            }
            CliError::Core(CoreError::BoundViolated { bound, value }) => {
                m.insert("kind".into(), json!("bound"));
                m.insert("bound".into(), json!(bound));
                m.insert("value".into(), rational_json(*value));
            }
            CliError::Core(CoreError::PrecisionExhausted { op, needed, available }) => {
                m.insert("kind".into(), json!("precision"));
                m.insert("op".into(), json!(op));
                m.insert("needed".into(), json!(needed));
                m.insert("available".into(), json!(available));
            }
            CliError::Usage(_) => {
                m.insert("kind".into(), json!("usage"));
            }
            CliError::Core(_) => {
                m.insert("kind".into(), json!("validation"));
            }
            CliError::Io(_) => {
                m.insert("kind".into(), json!("io"));
            }
        }
        json!({ "schema": SCHEMA, "error": err })
    }
}
