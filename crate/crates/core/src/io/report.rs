//! Deterministic JSON run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    /// Input file path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub parameters: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    pub wall_time: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            parameters: Value::Object(Default::default()),
            results: Value::Null,
            warnings: Vec::new(),
            wall_time: None,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert(
            "inputs".into(),
            Value::Object(self.inputs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()),
        );
        m.insert("parameters".into(), self.parameters.clone());
        m.insert("results".into(), self.results.clone());
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::String).collect()),
        );
        if let Some(t) = self.wall_time {
            m.insert("wall_time".into(), serde_json::json!(t));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        canonical_json(&self.to_value())
    }
}

/// Indented JSON with sorted keys and every float written with 17 significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat("  ").take(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64");
                let _ = write!(out, "{x:.16e}");
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short arrays of scalars stay on one line.
            if items.len() <= 4 && items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_and_formatted() {
        let v = json!({"b": 1.0, "a": [0.1, 2], "c": f64::NAN});
        let s = canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("\"c\": null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn wall_time_only_when_set() {
        let mut r = RunReport::new("x");
        assert!(!r.to_json().contains("wall_time"));
        r.wall_time = Some(0.5);
        assert!(r.to_json().contains("wall_time"));
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
