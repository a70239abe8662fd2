//! JSON report emission: sorted keys, 17 significant digits, no NaN.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_value::Value as RawValue;

use crate::error::{QnetError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Compact,
    Pretty,
}

/// One verified property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// A non-finite error is recorded as `f64::MAX` and fails.
    pub fn new(name: impl Into<String>, max_abs_error: f64, tolerance: f64) -> Self {
        let err = if max_abs_error.is_finite() {
            max_abs_error
        } else {
            f64::MAX
        };
        Check {
            name: name.into(),
            max_abs_error: err,
            tolerance,
            passed: max_abs_error.is_finite() && err <= tolerance,
        }
    }

    /// Pass/fail check with error 0 or 1 against tolerance 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_name: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    kind: String,
    version: String,
    report: T,
}

fn find_non_finite(v: &RawValue, path: &mut Vec<String>) -> Option<String> {
    match v {
        RawValue::F32(x) if !x.is_finite() => Some(path.join(".")),
        RawValue::F64(x) if !x.is_finite() => Some(path.join(".")),
        RawValue::Seq(items) => items.iter().enumerate().find_map(|(i, x)| {
            path.push(i.to_string());
            let hit = find_non_finite(x, path);
            path.pop();
            hit
        }),
        RawValue::Map(map) => map.iter().find_map(|(k, x)| {
            path.push(match k {
                RawValue::String(s) => s.clone(),
                other => format!("{other:?}"),
            });
            let hit = find_non_finite(x, path);
            path.pop();
            hit
        }),
        RawValue::Option(Some(x)) | RawValue::Newtype(x) => find_non_finite(x, path),
        _ => None,
    }
}

/// Writes floats as `{:.16e}` (17 significant digits) and forwards layout
/// to the wrapped formatter.
struct Digits<F>(F);

macro_rules! forward {
    ($($name:ident),*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        })*
    };
}

macro_rules! forward_first {
    ($($name:ident),*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
            self.0.$name(w, first)
        })*
    };
}

impl<F: Formatter> Formatter for Digits<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(value))
    }

    forward!(begin_array, end_array, end_array_value, begin_object, end_object, begin_object_value, end_object_value);
    forward_first!(begin_array_value, begin_object_key);
}

/// Serialize `report` inside a `{kind, version, report}` envelope. Keys are
/// sorted at every level; a NaN or infinite number is an error.
pub fn emit_report<T: Serialize>(kind: &str, report: &T, style: Style) -> Result<String> {
    let raw = serde_value::to_value(report).map_err(|e| QnetError::Serialization(e.to_string()))?;
    if let Some(path) = find_non_finite(&raw, &mut Vec::new()) {
        return Err(QnetError::Serialization(format!(
            "non-finite number at '{}' in {kind} report",
            if path.is_empty() { "<root>" } else { &path }
        )));
    }
    let envelope = Envelope {
        kind: kind.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        report,
    };
    // a Value round trip sorts map keys
    let value = serde_json::to_value(&envelope)?;
    let mut out = Vec::new();
    match style {
        Style::Compact => {
            let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits(CompactFormatter));
            value.serialize(&mut ser)?;
        }
        Style::Pretty => {
            let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits(PrettyFormatter::new()));
            value.serialize(&mut ser)?;
            out.push(b'\n');
        }
    }
    String::from_utf8(out).map_err(|e| QnetError::Serialization(e.to_string()))
}

/// Read back the payload of [`emit_report`] output.
pub fn parse_report<T: DeserializeOwned>(text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    Ok(env.report)
}
