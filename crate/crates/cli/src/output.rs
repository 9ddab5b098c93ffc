//! Rendering of results as human text, JSON or CSV. Every float carries at
//! most 12 significant digits.

use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Fixed notation with 12 decimals in `[1e-3, 1e6)`, scientific otherwise.
pub fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{v:.12}")
    } else if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round12(n.as_f64().expect("f64 number"));
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    round_value(serde_json::to_value(v).expect("report types serialize"))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_float(n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(" "),
        Value::Object(_) => serde_json::to_string(v).unwrap(),
    }
}

/// Flattens nested objects to dotted keys; arrays of scalars stay whole.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn human(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, x)| format!("{k:width$}  {}\n", scalar_text(x)))
        .collect()
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.to_string(),
        other => scalar_text(other),
    }
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::Array(a) => a.iter().map(csv_scalar).collect::<Vec<_>>().join(";"),
        other => csv_scalar(other),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// One header row plus one row per record; a lone object is one record.
pub fn csv(v: &Value) -> String {
    let records: Vec<Value> = match v {
        Value::Array(a) => a.clone(),
        other => vec![other.clone()],
    };
    let mut out = String::new();
    let mut header: Option<Vec<String>> = None;
    for r in &records {
        let mut cells = Vec::new();
        flatten("", r, &mut cells);
        if header.is_none() {
            let h: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
            out.push_str(&h.join(","));
            out.push('\n');
            header = Some(h);
        }
        out.push_str(&cells.iter().map(|(_, x)| csv_field(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => csv(v),
        Format::Human => human(v),
    }
}

/// Builds a JSON object from `(key, value)` pairs in order.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
