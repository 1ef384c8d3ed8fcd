//! JSON-lines records, their CSV projection and the run summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

/// Summary of one run. `config` is the canonical config, so
/// `config_hash` can be recomputed from the record alone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub version: String,
    pub kind: String,
    pub seed: u64,
    pub config: Value,
    pub records: usize,
    /// Grid points that failed and appear as error records.
    pub failures: usize,
    pub partial: bool,
    pub wall_seconds: f64,
    /// Seconds since the Unix epoch at completion; excluded from
    /// reproducibility comparisons, like `wall_seconds`.
    pub timestamp: u64,
    pub payload: Vec<Value>,
}

/// One JSON-lines entry per record, each tagged with the config hash.
pub fn json_lines(hash: &str, kind: &str, records: &[Value]) -> String {
    let mut s = String::new();
    for (i, r) in records.iter().enumerate() {
        let line = json!({ "config_hash": hash, "kind": kind, "index": i, "record": r });
        s.push_str(&line.to_string());
        s.push('\n');
    }
    s
}

/// Array field expanded into one CSV row per element, per kind.
fn row_field(kind: &str) -> Option<&'static str> {
    match kind {
        "deviation" => Some("cells"),
        "highpoints" => Some("levels"),
        "constants" => Some("capacity"),
        _ => None,
    }
}

/// Scalars of `v` under dotted keys; arrays are left out.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(_) => {}
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn rows(kind: &str, record: &Value) -> Vec<Vec<(String, Value)>> {
    let mut base = Vec::new();
    flatten("", record, &mut base);
    let items = row_field(kind)
        .and_then(|f| record.get(f).map(|a| (f, a)))
        .and_then(|(f, a)| a.as_array().map(|a| (f, a)));
    match items {
        Some((field, items)) if !items.is_empty() => items
            .iter()
            .map(|it| {
                let mut row = base.clone();
                flatten(field, it, &mut row);
                row
            })
            .collect(),
        _ => vec![base],
    }
}

/// Flat CSV projection: one row per record (or per element of the
/// kind's row field), columns in first-seen order.
pub fn csv_projection(kind: &str, records: &[Value]) -> Result<String> {
    let all: Vec<Vec<(String, Value)>> = records.iter().flat_map(|r| rows(kind, r)).collect();
    let mut header: Vec<String> = Vec::new();
    for row in &all {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &all {
        let map: Map<String, Value> = row.iter().cloned().collect();
        w.write_record(header.iter().map(|h| match map.get(h) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        }))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(contents.as_bytes())?;
    f.flush()?;
    Ok(())
}
