//! Schema-versioned JSON report envelope shared by the command-line tool.

use serde::Serialize;

use crate::ends::{EndReport, O1Table};
use crate::sing::SingReport;
use crate::surface::ProbeReport;
use crate::wdata::ValidationReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument<T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    /// Fixture name or file path, when the command has one.
    pub source: Option<String>,
    pub timings_ms: Timings,
    pub result: T,
}

impl<T: Serialize> ReportDocument<T> {
    pub fn new(command: impl Into<String>, source: Option<String>, result: T, elapsed: std::time::Duration) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: "zmc",
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            source,
            timings_ms: Timings { total: elapsed.as_secs_f64() * 1e3 },
            result,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub domain: crate::localanalysis::DomainKind,
    pub punctures: Vec<crate::Point>,
    pub g: String,
    pub omega: String,
    pub validation: ValidationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyResult {
    pub name: String,
    pub validation: ValidationReport,
    pub ends: Vec<EndReport>,
    pub asymptotics: Vec<O1Table>,
    pub singular: Vec<SingReport>,
    pub probe: Option<ProbeReport>,
}
