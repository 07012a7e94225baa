//! Artifact assembly: one JSON document or one CSV table per invocation,
//! both embedding the resolved configuration.

use crate::Format;
use serde_json::Value;

/// Tabular view of the results for CSV output. `scalars` carries result
/// fields that have no row of their own (they ride along as a comment line,
/// since the JSON artifact is the primary structured form).
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub scalars: Option<Value>,
}

pub struct Artifact {
    pub config: Value,
    pub results: Value,
    pub table: Table,
}

pub fn render(artifact: &Artifact, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "config": artifact.config,
                "results": artifact.results,
            });
            let mut text =
                serde_json::to_string_pretty(&doc).expect("artifact serializes to JSON");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = String::new();
            text.push_str("# config: ");
            text.push_str(&artifact.config.to_string());
            text.push('\n');
            if let Some(scalars) = &artifact.table.scalars {
                text.push_str("# scalars: ");
                text.push_str(&scalars.to_string());
                text.push('\n');
            }
            text.push_str(&artifact.table.header.join(","));
            text.push('\n');
            for row in &artifact.table.rows {
                text.push_str(&row.join(","));
                text.push('\n');
            }
            text
        }
    }
}

/// Shortest round-trip decimal rendering with a '.' separator (float
/// `Display` is locale-independent in Rust).
pub fn fnum(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

/// Optional float: empty cell when absent.
pub fn onum(x: Option<f64>) -> String {
    x.map(fnum).unwrap_or_default()
}
