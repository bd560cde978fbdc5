//! Report emission: a uniform JSON envelope with all floating-point numbers
//! rounded to 12 significant digits (golden-file stability across platforms),
//! plus the plot-ready CSV for stability experiments.

use std::io::Write;
use std::path::Path;

use haezendonck::stability::ExperimentRow;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ConfigEcho;
use crate::CliError;

/// Round to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let scale = 10f64.powf(11.0 - magnitude);
    (x * scale).round() / scale
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    return serde_json::Number::from_f64(round_sig(f))
                        .map(Value::Number)
                        .unwrap_or(Value::Null);
                }
            }
            Value::Number(n)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            let mut out = Map::with_capacity(map.len());
            for (k, v) in map {
                out.insert(k, round_value(v));
            }
            Value::Object(out)
        }
        other => other,
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    phi: haezendonck::PhiDescriptor,
    config: &'a ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    result: T,
}

pub fn emit<T: Serialize>(
    command: &str,
    phi: &haezendonck::OrliczFunction,
    config: &ConfigEcho,
    input: Option<&str>,
    with_timestamp: bool,
    result: T,
) -> Result<String, CliError> {
    let envelope = Envelope {
        command,
        phi: phi.descriptor(),
        config,
        input,
        timestamp: with_timestamp.then(|| chrono::Utc::now().to_rfc3339()),
        result,
    };
    let value = serde_json::to_value(&envelope)
        .map_err(|e| CliError::Internal(format!("serialization: {e}")))?;
    serde_json::to_string_pretty(&round_value(value))
        .map_err(|e| CliError::Internal(format!("serialization: {e}")))
}

fn csv_cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{:.11e}", round_sig(x)),
        _ => "inf".to_string(),
    }
}

/// Plot-ready CSV: one row per computed index.
pub fn write_rows_csv(path: &Path, rows: &[ExperimentRow]) -> Result<(), CliError> {
    let mut out = std::fs::File::create(path)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    writeln!(out, "n,premium,n_alpha,mean,modular")
        .map_err(|e| CliError::Internal(e.to_string()))?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            csv_cell(r.premium),
            csv_cell(r.n_alpha),
            csv_cell(r.mean),
            csv_cell(r.modular)
        )
        .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    Ok(())
}
