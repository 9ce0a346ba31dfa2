use std::fs;
use std::io::{self, Write};
use std::path::Path;

use divisor_series::{Error, Interval};
use rug::float::Round;
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                Error::Domain(_) | Error::InvalidArgument(_) | Error::ZeroConstantTerm | Error::ZeroPolynomial,
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Writes `text` to stdout and, when given, to `path`; always newline-terminated.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    if let Some(p) = path {
        fs::write(p, &body)?;
    }
    io::stdout().lock().write_all(body.as_bytes())?;
    Ok(())
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// `lo`, `hi` as outward-rounded doubles, plus decimal strings when asked.
pub fn enclosure_fields(v: &Interval, digits: Option<usize>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("lo".into(), json!(v.lo_f64()));
    m.insert("hi".into(), json!(v.hi_f64()));
    if let Some(d) = digits {
        let d = d.max(1);
        m.insert("lo_decimal".into(), json!(v.lo().to_string_radix_round(10, Some(d), Round::Down)));
        m.insert("hi_decimal".into(), json!(v.hi().to_string_radix_round(10, Some(d), Round::Up)));
    }
    m
}

pub const CSV_HEADER: &str = "q,lhs_lo,lhs_hi,mid_lo,mid_hi,rhs_lo,rhs_hi,status";

pub fn csv_preamble(schema_version: u32) -> String {
    format!("# schema_version: {schema_version}\n")
}
