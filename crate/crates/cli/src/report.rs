//! Report envelope and error classification.

use fpa_core::error::{GadgetError, ModelError, SolveError, TransformError, UtilityError};
use fpa_core::format::FormatError;
use fpa_core::rational::{format_rational, ParseRationalError, Rational};
use serde_json::{json, Map, Value};

pub struct Outcome {
    pub body: Map<String, Value>,
    /// False when a verification did not hold.
    pub passed: bool,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Budget(m) => m,
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Input(e.to_string())
            }
        })*
    };
}

input_error!(ModelError, TransformError, FormatError, ParseRationalError, std::io::Error);

impl From<UtilityError> for CliError {
    fn from(e: UtilityError) -> Self {
        match e {
            UtilityError::TooLarge { .. } => Self::Budget(e.to_string()),
            UtilityError::Model(m) => m.into(),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BudgetExhausted { .. } | SolveError::TooLarge(_) => Self::Budget(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::TooLarge(_) => Self::Budget(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

pub fn q(r: &Rational) -> Value {
    json!(format_rational(r))
}

pub fn qs(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(q).collect())
}

fn envelope(command: &str, seed: u64, verdict: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("verdict".into(), json!(verdict));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("seed".into(), json!(seed));
    m
}

/// Adds the envelope; a body may set its own verdict.
pub fn finish(command: &str, seed: u64, body: Map<String, Value>, passed: bool) -> Value {
    let mut m = envelope(command, seed, if passed { "pass" } else { "fail" });
    m.extend(body);
    Value::Object(m)
}

pub fn error(command: &str, seed: u64, e: &CliError) -> Value {
    let verdict = match e {
        CliError::Input(_) => "error",
        CliError::Budget(_) => "budget-exhausted",
    };
    let mut m = envelope(command, seed, verdict);
    m.insert("error".into(), json!(e.message()));
    Value::Object(m)
}

/// Report for arguments that did not parse; no seed is known yet.
pub fn usage_error(msg: &str) -> Value {
    json!({
        "command": null,
        "verdict": "error",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": null,
        "error": msg.trim_end(),
    })
}
