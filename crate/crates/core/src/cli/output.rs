use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Error;

/// One JSON object per invocation.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Value,
    pub results: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results: Map::new(),
            diagnostics: Map::new(),
            error: None,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), to_value(value));
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics.insert(key.to_string(), to_value(value));
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATISTICAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_DIVERGENT: i32 = 5;
pub const EXIT_VERIFY_BASE: i32 = 10;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DomainViolation(_) | Error::NotComparable => EXIT_DOMAIN,
        Error::QuadratureFailure { .. } | Error::ConvergenceFailure { .. } | Error::ContourViolation(_) => {
            EXIT_NUMERICAL
        }
        Error::DivergentIntegral { .. } => EXIT_DIVERGENT,
    }
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::DomainViolation(_) => "domain_violation",
        Error::NotComparable => "not_comparable",
        Error::QuadratureFailure { .. } => "quadrature_failure",
        Error::ConvergenceFailure { .. } => "convergence_failure",
        Error::ContourViolation(_) => "contour_violation",
        Error::DivergentIntegral { .. } => "divergent_integral",
    }
}

/// The structured stand-in for a divergent quantity.
pub fn divergence_value(err: &Error) -> Option<Value> {
    match err {
        Error::DivergentIntegral { direction, detail } => Some(serde_json::json!({
            "divergent": true,
            "direction": direction.as_str(),
            "detail": detail,
        })),
        _ => None,
    }
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// CSV rendering: arrays of objects become one row per element with the
/// keys of the first element as header; everything else becomes
/// `name,value` rows.
pub fn to_csv(record: &OutputRecord) -> String {
    let mut out = String::new();
    if record.results.len() == 1 {
        if let Some(Value::Array(rows)) = record.results.values().next() {
            if let Some(Value::Object(first)) = rows.first() {
                let keys: Vec<&String> = first.keys().collect();
                out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
                out.push('\n');
                for row in rows {
                    let fields: Vec<String> = keys
                        .iter()
                        .map(|k| csv_field(row.get(k.as_str()).unwrap_or(&Value::Null)))
                        .collect();
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
                return out;
            }
        }
    }
    out.push_str("name,value\n");
    for (k, v) in &record.results {
        out.push_str(&format!("{},{}\n", csv_field(&Value::String(k.clone())), csv_field(v)));
    }
    out
}
