//! JSON reports written by every command.

use serde::Serialize;
use serde_json::Value;

use super::format::MAGIC;

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub file_format: &'static str,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            file_format: MAGIC,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub policy: Value,
    pub provenance: Provenance,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// A report and whether every verification it carries held.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub verified: bool,
}
