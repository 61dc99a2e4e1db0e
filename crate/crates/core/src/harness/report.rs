//! Versioned report envelope.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "spx-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Instance path or generator description.
    pub instance: Option<String>,
    pub eta: String,
    pub delta: String,
    pub seed: u64,
    pub workers: usize,
    pub budget: u64,
    pub slack: f64,
    pub output: Option<String>,
    pub format: ReportFormat,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        RunConfig {
            command: command.into(),
            instance: None,
            eta: "1/2".into(),
            delta: "1/10".into(),
            seed: 0,
            workers: 0,
            budget: crate::solvers::SolverConfig::default().budget,
            slack: 1.0,
            output: None,
            format: ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    /// Seconds since the Unix epoch; the only field that differs between
    /// reruns.
    pub generated_at: Option<u64>,
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: RunConfig, body: T) -> Self {
        Report { schema: REPORT_SCHEMA, version: env!("CARGO_PKG_VERSION"), config, generated_at: None, body }
    }

    pub fn stamped(mut self) -> Self {
        self.generated_at = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
