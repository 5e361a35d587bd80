//! JSON and CSV rendering with fixed significant digits.
//!
//! Floats are written like C's `%.{p}g`: 17 significant digits in JSON,
//! so every value round-trips, and 12 in CSV.

use serde_json::Value;

pub const JSON_DIGITS: usize = 17;
pub const CSV_DIGITS: usize = 12;

/// `x` with `digits` significant digits, trailing zeros removed.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn number(n: &serde_json::Number, digits: usize) -> String {
    match n.as_f64() {
        Some(x) if n.is_f64() => {
            if x.is_finite() {
                format_g(x, digits)
            } else {
                "null".into()
            }
        }
        _ => n.to_string(),
    }
}

/// Pretty-printed JSON with two-space indentation.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n, JSON_DIGITS)),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            // numeric arrays stay on one line
            if items.iter().all(|x| x.is_number()) {
                let parts: Vec<String> = items.iter().map(|x| number(x.as_number().expect("number"), JSON_DIGITS)).collect();
                out.push('[');
                out.push_str(&parts.join(", "));
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => number(n, CSV_DIGITS),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => csv_cell(&Value::String(other.to_string())),
    }
}

/// Flattens nested objects and arrays into `a.b[0]`-style columns.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.clone())),
    }
}

/// CSV with a header row; each row is flattened separately and the header
/// comes from the first row.
pub fn to_csv(rows: &[Value]) -> String {
    let flat: Vec<Vec<(String, Value)>> = rows
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", r, &mut cells);
            cells
        })
        .collect();
    let Some(first) = flat.first() else {
        return String::new();
    };
    let mut out = first.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &flat {
        out.push_str(&row.iter().map(|(_, v)| csv_cell(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn significant_digits() {
        assert_eq!(format_g(std::f64::consts::PI, 17), "3.1415926535897931");
        assert_eq!(format_g(std::f64::consts::PI, 12), "3.14159265359");
        assert_eq!(format_g(0.1, 17), "0.10000000000000001");
        assert_eq!(format_g(2.0, 17), "2");
        assert_eq!(format_g(-1.5e-7, 12), "-1.5e-07");
        assert_eq!(format_g(6.02e23, 12), "6.02e+23");
        assert_eq!(format_g(0.0, 17), "0");
        assert_eq!(format_g(123456.0, 3), "1.23e+05");
        assert_eq!(format_g(1e-4, 17), "0.0001");
    }

    #[test]
    fn json_round_trips_floats() {
        let x: f64 = 0.1 + 0.2;
        let text = to_json(&json!({"x": x, "v": [1.0, x], "n": 3}));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap().to_bits(), x.to_bits());
        assert_eq!(back["n"], 3);
        assert!(text.contains("\"v\": [1, 0.30000000000000004]"));
    }

    #[test]
    fn csv_flattening() {
        let rows = [json!({"k": 1, "g": {"kind": "spherical"}, "v": [0.5, 2.0]}), json!({"k": 2, "g": {"kind": "a,b"}, "v": [1.0, 1.0]})];
        assert_eq!(to_csv(&rows), "k,g.kind,v[0],v[1]\n1,spherical,0.5,2\n2,\"a,b\",1,1\n");
        assert_eq!(to_csv(&[]), "");
    }
}
