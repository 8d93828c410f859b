use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Errors the CLI can end with, mapped onto stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A flag is missing, malformed or inconsistent with the others.
    Config(String),
    Core(erm_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<erm_core::Error> for CliError {
    fn from(e: erm_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use erm_core::Error::*;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                Precondition(_) | Validity(_) | Budget { .. } => EXIT_CONFIG,
                Io(_) | Csv(_) | Json(_) | Schema(_) | Parse { .. } | ConstantFeature(_) | DegenerateLabels(_)
                | Shape(_) | Size(_) => EXIT_DATA,
                Singular { .. } | Convergence { .. } | Divergence { .. } | Numeric(_) | Domain(_) => EXIT_NUMERIC,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub enum Body {
    /// Wrapped in the report envelope and written as JSON.
    Report(serde_json::Value),
    /// Written verbatim.
    Table(Vec<u8>),
}

pub struct Output {
    pub body: Body,
    pub dest: Option<PathBuf>,
}

impl Output {
    pub fn report<T: Serialize>(value: &T, dest: Option<&Path>) -> CliResult<Self> {
        Ok(Self {
            body: Body::Report(serde_json::to_value(value)?),
            dest: dest.map(Path::to_path_buf),
        })
    }

    pub fn table(bytes: Vec<u8>, dest: Option<&Path>) -> Self {
        Self {
            body: Body::Table(bytes),
            dest: dest.map(Path::to_path_buf),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    seed: u64,
    version: &'static str,
    wall_clock_ms: u128,
    result: &'a serde_json::Value,
}

pub fn emit(out: &Output, command: &str, seed: u64, wall_clock_ms: u128) -> CliResult<()> {
    let bytes = match &out.body {
        Body::Report(result) => {
            let env = Envelope {
                command,
                seed,
                version: env!("CARGO_PKG_VERSION"),
                wall_clock_ms,
                result,
            };
            let mut s = serde_json::to_string_pretty(&env)?;
            s.push('\n');
            s.into_bytes()
        }
        Body::Table(b) => b.clone(),
    };
    match &out.dest {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

/// Space-joined arguments, quoting any that contain whitespace.
pub fn command_echo(args: &[String]) -> String {
    args.iter()
        .map(|a| {
            if a.is_empty() || a.chars().any(char::is_whitespace) {
                format!("'{a}'")
            } else {
                a.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
