use serde::Serialize;
use serde_json::Value;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FIT: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;
/// Numerical or I/O failure that is neither a usage error nor one of the
/// verification outcomes above.
pub const EXIT_RUNTIME: i32 = 1;

/// Error reported as a single JSON object on standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl CliError {
    pub fn new(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind: kind.into(),
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }

    pub fn usage_from(e: weakcrit_core::Error) -> Self {
        Self::new(EXIT_USAGE, e.kind(), e.to_string())
    }

    pub fn runtime(e: weakcrit_core::Error) -> Self {
        Self::new(EXIT_RUNTIME, e.kind(), e.to_string())
    }

    pub fn io(e: std::io::Error) -> Self {
        Self::new(EXIT_RUNTIME, "io", e.to_string())
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("error serializes");
        v["exit_code"] = self.code.into();
        serde_json::to_string(&serde_json::json!({ "error": v })).expect("error serializes")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}
