//! `eden`: classification, surveys, specification certificates, entropy and
//! principal-action tools over the `eden-core` library.

mod args;
mod commands;
mod render;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use eden_core::EdenError;
use serde_json::{json, Value};

use args::Cli;

/// Version of the JSON report layout in `schema/report.schema.json`.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<EdenError> for Failure {
    fn from(e: EdenError) -> Self {
        let code = match e {
            EdenError::InvalidInput(_) | EdenError::Representation(_) => 2,
            EdenError::Capacity(_) => 3,
            EdenError::Inconclusive(_) => 4,
            EdenError::Invariant(_) => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

/// A finished computation: the report body plus the exit status it implies.
pub struct Outcome {
    pub command: &'static str,
    pub result: Value,
    /// Plain-text rendering when it differs from the generic one.
    pub text: Option<String>,
    pub code: u8,
    pub note: Option<String>,
}

impl Outcome {
    pub fn ok(command: &'static str, result: Value) -> Self {
        Outcome { command, result, text: None, code: 0, note: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eden_core::capacity::init_from_env();
    let start = Instant::now();
    let outcome = commands::run(&cli.command);
    let elapsed = start.elapsed();
    let out = match outcome {
        Ok(o) => o,
        Err(f) => {
            if cli.json {
                let doc = json!({ "version": REPORT_VERSION, "error": { "code": f.code, "message": f.message } });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                eprintln!("eden: {}", f.message);
            }
            return ExitCode::from(f.code);
        }
    };
    let mut doc = json!({ "version": REPORT_VERSION, "command": out.command, "result": out.result });
    if cli.timing {
        doc["timing_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }
    let body = if cli.json {
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    } else {
        out.text.clone().unwrap_or_else(|| render::text(&doc))
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                eprintln!("eden: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if let Some(note) = &out.note {
        eprintln!("eden: {note}");
    }
    ExitCode::from(out.code)
}
