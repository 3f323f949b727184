use lowlying::ErrorKind;
use serde_json::json;
use std::fmt;

/// A failed run, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Config,
    Numeric,
    SupportGate,
    Io,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Config, message: msg.into() }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Numeric, message: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Config | Kind::Io => 2,
            Kind::Numeric => 3,
            Kind::SupportGate => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self.kind {
            Kind::Config => "config",
            Kind::Numeric => "numeric",
            Kind::SupportGate => "support_gate",
            Kind::Io => "io",
        };
        json!({ "error": { "kind": kind, "message": self.message, "exit_code": self.exit_code() } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<lowlying::Error> for CliError {
    fn from(e: lowlying::Error) -> Self {
        let kind = match e.kind() {
            ErrorKind::Config => Kind::Config,
            ErrorKind::Numeric => Kind::Numeric,
            ErrorKind::SupportGate => Kind::SupportGate,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { kind: Kind::Io, message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self { kind: Kind::Io, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self { kind: Kind::Io, message: e.to_string() }
    }
}

impl From<clap::Error> for CliError {
    fn from(e: clap::Error) -> Self {
        Self::config(e.to_string())
    }
}
