//! Request/response layer behind the `abmirror` binary.
//!
//! A request names a command, carries a JSON payload and the search options.
//! [`run`] validates the payload against the command's schema, runs the
//! analysis and returns a JSON document plus a text rendering.

mod commands;
mod text;

use std::fmt;

use abmirror_core::periods::NumericMode;
use abmirror_core::Error as CoreError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use commands::{
    DualDoc, GramDoc, MirrorPairDoc, OracleDoc, PeriodDoc, SweepDoc, SweepFamily,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    MirrorPair,
    SelfMirror,
    Dual,
    Period,
    Oracle,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::MirrorPair => "mirror-pair",
            Command::SelfMirror => "self-mirror",
            Command::Dual => "dual",
            Command::Period => "period",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    pub bound: u64,
    pub cap: u64,
    pub numeric: NumericMode,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20240601;

impl Default for Options {
    fn default() -> Self {
        Options {
            bound: abmirror_core::mirror::DEFAULT_BOUND,
            cap: abmirror_core::disc::DEFAULT_CAP,
            numeric: NumericMode::Exact,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub command: Command,
    pub payload: Value,
    pub options: Options,
}

/// Process exit status of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// `oracle` found instances where the criterion and brute force differ.
    Disagreement,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Disagreement => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Response {
    pub document: Value,
    pub text: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Malformed input: bad JSON, schema violation or an invalid lattice.
    Validation(String),
    /// A bounded search gave up.
    Search(String),
    Io(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Search(_) => 3,
            CliError::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Search(_) => "search",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Search(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }

    pub fn document(&self) -> Value {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.message() } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SearchExhausted { .. } | CoreError::CapExceeded { .. } => {
                CliError::Search(e.to_string())
            }
            CoreError::Internal(m) => CliError::Internal(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Deserializes `value`, reporting the path of the offending field.
pub fn parse_payload<T: DeserializeOwned>(value: &Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("at {path}: {}", e.inner()))
    })
}

/// Parses JSON text, reporting line and column on syntax errors.
pub fn parse_json(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid JSON: {e}")))
}

pub fn run(request: &AnalysisRequest) -> Result<Response, CliError> {
    let opts = &request.options;
    let p = &request.payload;
    let (document, status) = match request.command {
        Command::Analyze => commands::analyze(&parse_payload(p)?, opts)?,
        Command::MirrorPair => commands::mirror_pair(&parse_payload(p)?, opts)?,
        Command::SelfMirror => commands::self_mirror(&parse_payload(p)?)?,
        Command::Dual => commands::dual(&parse_payload(p)?)?,
        Command::Period => commands::period(&parse_payload(p)?, opts)?,
        Command::Oracle => commands::oracle(&parse_payload(p)?, opts)?,
        Command::Sweep => commands::sweep(&parse_payload(p)?)?,
    };
    let text = text::render(request.command, &document);
    Ok(Response { document, text, status })
}
