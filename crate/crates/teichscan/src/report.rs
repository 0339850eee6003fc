//! Versioned JSON envelopes for the reports the CLI writes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCAN_SCHEMA: &str = "teichscan-scan/1";
pub const QUASICONVEXITY_SCHEMA: &str = "teichscan-quasiconvexity/1";
pub const DECOMPOSITION_SCHEMA: &str = "teichscan-decomposition/1";
pub const ESTIMATE_SCHEMA: &str = "teichscan-estimate/1";
pub const SUITE_SCHEMA: &str = "teichscan-suite/1";
pub const VALIDATION_SCHEMA: &str = "teichscan-validation/1";
pub const EXAMPLE_SCHEMA: &str = "teichscan-example/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json<T: Serialize>(schema: &str, body: &T) -> String {
    let mut out =
        serde_json::to_string_pretty(&Envelope { schema: schema.to_string(), body }).expect("reports serialize");
    out.push('\n');
    out
}

/// Parse an envelope, rejecting any schema other than `schema`.
pub fn from_json<T: DeserializeOwned>(schema: &str, text: &str) -> CliResult<T> {
    #[derive(Deserialize)]
    struct Head {
        schema: String,
    }
    let head: Head = serde_json::from_str(text)?;
    if head.schema != schema {
        return Err(CliError::config(format!("unknown schema {:?}, expected {schema}", head.schema)));
    }
    let env: Envelope<T> = serde_json::from_str(text)?;
    Ok(env.body)
}
