//! The JSON report every subcommand emits.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Keys that carry wall-clock measurements.
pub const TIMING_FIELDS: &[&str] = &["wall_ms", "ms_median"];

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub subcommand: String,
    /// Input path → SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub parameters: Value,
    pub outputs: Value,
    pub wall_ms: f64,
    pub version: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Copy of `v` with timing fields removed at every depth.
pub fn strip_timing(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.iter()
                .filter(|(k, _)| !TIMING_FIELDS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), strip_timing(v)))
                .collect(),
        ),
        Value::Array(items) => Value::Array(items.iter().map(strip_timing).collect()),
        other => other.clone(),
    }
}

/// Sorted-key JSON without timing fields, for determinism comparisons.
pub fn canonical_json(text: &str) -> serde_json::Result<String> {
    let v: Value = serde_json::from_str(text)?;
    serde_json::to_string(&strip_timing(&v))
}

/// Flat `key  value` lines for `--pretty`.
pub fn render_table(report: &RunReport) -> String {
    let mut rows = Vec::new();
    rows.push(("subcommand".to_string(), report.subcommand.clone()));
    for (k, v) in &report.inputs {
        rows.push((format!("input {k}"), v.clone()));
    }
    flatten("param", &report.parameters, &mut rows);
    flatten("output", &report.outputs, &mut rows);
    rows.push(("wall_ms".to_string(), format!("{:.3}", report.wall_ms)));
    rows.push(("version".to_string(), report.version.clone()));
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, rows);
            }
        }
        Value::Array(items) if items.len() > 8 => {
            rows.push((prefix.to_string(), format!("[{} values]", items.len())));
        }
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn canonical_drops_timing_and_sorts() {
        let a = canonical_json(r#"{"b":1,"wall_ms":3.5,"a":{"ms_median":2,"x":[1]}}"#).unwrap();
        let b = canonical_json(r#"{"a":{"x":[1],"ms_median":9},"b":1,"wall_ms":0.1}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, r#"{"a":{"x":[1]},"b":1}"#);
    }
}
