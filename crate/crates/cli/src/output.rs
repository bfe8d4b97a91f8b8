//! CSV and JSON rendering. Numbers carry 17 significant digits so that
//! values survive a text round trip unchanged.

use serde_json::{json, Value};

use crate::config::Format;

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of optional numbers; `None` renders as an empty CSV cell or JSON null.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, metadata: &str) -> String {
        match format {
            Format::Csv => {
                let mut out = format!("# {metadata}\n{}\n", self.columns.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.map(number).unwrap_or_default()).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| json!(r)).collect();
                let doc = json!({
                    "schema": 1,
                    "metadata": metadata,
                    "columns": self.columns,
                    "rows": rows,
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("table is serializable"))
            }
        }
    }
}
