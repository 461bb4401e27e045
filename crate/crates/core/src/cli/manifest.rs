use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::field::FieldSpec;

pub const SCHEMA: &str = "ame-phase.manifest/1";

/// Provenance attached to every artifact the CLI writes. `digest` covers the
/// artifact body only, so timing never affects it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    pub digest: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, body: &str) -> Self {
        RunManifest {
            schema: SCHEMA.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            field: None,
            rng_seed: None,
            elapsed_ms: 0,
            result: None,
            digest: digest(body),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("manifest serialises")
    }
}

pub fn digest(body: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(body.as_bytes())))
}
