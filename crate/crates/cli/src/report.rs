use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use revcipher_core::builders::Variant;
use revcipher_core::Cipher;

use crate::Format;

pub const DEFAULT_SEED: u64 = 0x5eed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Everything needed to rerun a command; embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cipher: Option<Cipher>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: &'static str,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            cipher: None,
            variant: None,
            rounds: None,
            inputs: Vec::new(),
            output: None,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// A command's result in both renderings.
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn emit(&self, format: Format) {
        let body = match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("report serializes") + "\n",
            Format::Text => self.text.clone(),
        };
        // a closed pipe (e.g. `| head`) is not an error worth reporting
        let _ = std::io::stdout().write_all(body.as_bytes());
    }
}
