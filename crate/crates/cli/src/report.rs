//! The report envelope shared by all subcommands: the configuration, the
//! artifact version, and a command-specific result payload. JSON output is
//! byte-identical for identical configurations; the text rendering shows
//! the same data.

use serde_json::Value;
use std::fmt::Write as _;
use std::io::Write as _;

pub struct Report {
    command: String,
    config: Value,
    result: Value,
    /// Replaces the generic text rendering (JSON output is unaffected).
    text_override: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: Value, result: Value) -> Report {
        Report {
            command: command.to_string(),
            config,
            result,
            text_override: None,
        }
    }

    pub fn with_text_override(mut self, text: String) -> Report {
        self.text_override = Some(text);
        self
    }

    pub fn emit(&self, as_json: bool) {
        let mut out = String::new();
        if as_json {
            let envelope = serde_json::json!({
                "artifact": {
                    "name": "permrep",
                    "version": env!("CARGO_PKG_VERSION"),
                },
                "command": self.command,
                "config": self.config,
                "result": self.result,
            });
            out.push_str(&serde_json::to_string_pretty(&envelope).expect("serializable envelope"));
            out.push('\n');
        } else {
            let _ = writeln!(
                out,
                "permrep {} -- {}",
                env!("CARGO_PKG_VERSION"),
                self.command
            );
            let _ = writeln!(out, "config: {}", compact(&self.config));
            match &self.text_override {
                Some(text) => out.push_str(text),
                None => render_text(&mut out, &self.result, 0),
            }
        }
        // tolerate a closed pipe on the reading side
        let stdout = std::io::stdout();
        let _ = stdout.lock().write_all(out.as_bytes());
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn render_text(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_text(out, val, indent + 1);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", compact(val));
                    }
                }
            }
        }
        Value::Array(items) => {
            if items
                .iter()
                .all(|i| !matches!(i, Value::Object(_) | Value::Array(_)))
            {
                let _ = writeln!(out, "{pad}{}", compact(v));
            } else {
                for item in items {
                    let _ = writeln!(out, "{pad}-");
                    render_text(out, item, indent + 1);
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", compact(v));
        }
    }
}
