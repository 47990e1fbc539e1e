//! Report rendering shared by all subcommands: an ordered key/value tree
//! printed either as annotated text or as one JSON document.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// One command's output: the resolved configuration (reproducibility header)
/// plus the results, both in insertion order.
pub struct Report {
    command: &'static str,
    config: Vec<(&'static str, Value)>,
    result: Vec<(&'static str, Value)>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            config: Vec::new(),
            result: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &'static str, value: impl Into<Value>) {
        self.config.push((key, value.into()));
    }

    pub fn result(&mut self, key: &'static str, value: impl Into<Value>) {
        self.result.push((key, value.into()));
    }

    /// The configuration echo as `# key: value` lines, reused verbatim in
    /// table and CM file headers so every artifact records how it was made.
    pub fn header_comments(&self) -> Vec<String> {
        let mut lines = vec![format!("command: {}", self.command)];
        for (k, v) in &self.config {
            lines.push(format!("{k}: {}", render(v)));
        }
        lines
    }

    pub fn print(&self, format: Format) {
        let mut text = String::new();
        match format {
            Format::Text => {
                for line in self.header_comments() {
                    text.push_str(&format!("# {line}\n"));
                }
                for (k, v) in &self.result {
                    text.push_str(&format!("{k} = {}\n", render(v)));
                }
            }
            Format::Json => {
                let mut config = serde_json::Map::new();
                for (k, v) in &self.config {
                    config.insert((*k).into(), v.clone());
                }
                let mut result = serde_json::Map::new();
                for (k, v) in &self.result {
                    result.insert((*k).into(), v.clone());
                }
                let doc = serde_json::json!({
                    "command": self.command,
                    "config": config,
                    "result": result,
                });
                text = serde_json::to_string_pretty(&doc).unwrap();
                text.push('\n');
            }
        }
        print_out(&text);
    }
}

/// Writes to stdout, exiting quietly if the read end has gone away (e.g.
/// piped into `head`) instead of panicking.
pub fn print_out(text: &str) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

/// Text form of a value: strings bare, everything else in JSON notation
/// (which round-trips floats exactly).
fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn db(variance: f64) -> f64 {
    10.0 * variance.log10()
}

/// Variances of the four quadratures with their dB equivalents, included in
/// every state report (ordered x1, p1, x2, p2).
pub fn variance_entries(cm: &twomode::CovarianceMatrix) -> Value {
    let m = cm.matrix();
    let labels = ["x1", "p1", "x2", "p2"];
    let rows: Vec<Value> = labels
        .iter()
        .enumerate()
        .take(m.nrows())
        .map(|(i, label)| {
            serde_json::json!({
                "quadrature": label,
                "variance": m[(i, i)],
                "variance_db": db(m[(i, i)]),
            })
        })
        .collect();
    Value::Array(rows)
}

/// A 4x4 matrix as nested JSON arrays (row-major).
pub fn matrix_value(m: &nalgebra::DMatrix<f64>) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| m[(i, j)].into()).collect()))
        .collect();
    Value::Array(rows)
}
