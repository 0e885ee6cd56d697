//! Report rendering. Floats are rounded to 9 significant digits.

use std::io::Write;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::commands::Table;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const SIG_DIGITS: usize = 9;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `v`; integers are left alone.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// `{schema_version, command, ...fields}` with rounded floats.
pub fn envelope(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("command".into(), command.into());
    match round_value(body) {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

/// Flattens nested objects and arrays into dotted keys.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(o) => o.iter().for_each(|(k, v)| walk(&key(k), v, out)),
            Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) && prefix_is_complex(prefix) => {
                let im = a[1].to_string();
                let sign = if im.starts_with('-') { "" } else { "+" };
                out.push((prefix.to_string(), format!("{}{sign}{im}i", a[0])));
            }
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&key(&i.to_string()), v, out)),
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn prefix_is_complex(prefix: &str) -> bool {
    let last = prefix.rsplit('.').next().unwrap_or(prefix);
    last.parse::<usize>().is_ok() || matches!(last, "p1" | "p2" | "worst_z" | "worst_value")
}

pub fn emit(report: &Value, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Plain => {
            for (k, v) in flatten(report) {
                writeln!(out, "{k}: {v}")?;
            }
        }
        Format::Csv => {
            let fields = flatten(report);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(fields.iter().map(|(k, _)| k))
                .and_then(|_| w.write_record(fields.iter().map(|(_, v)| v)))
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

/// One CSV row per record, rounded like the JSON output; nulls are empty.
pub fn emit_table(table: &Table, out: &mut dyn Write) -> Result<(), CliError> {
    let cell = |v: Option<&Value>| match v.map(|v| round_value(v.clone())) {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s,
        Some(other) => other.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    let result = (|| {
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(table.columns.iter().map(|c| cell(row.get(*c))))?;
        }
        w.flush()?;
        Ok::<_, csv::Error>(())
    })();
    result.map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round_sig(3f64.sqrt()), 1.73205081);
        assert_eq!(round_sig((2.0f64 / 3.0).sqrt()), 0.816496581);
        assert_eq!(round_sig(123456789012.0), 123456789000.0);
        assert_eq!(round_sig(0.0), 0.0);
        let v = round_value(json!({"a": 1.0 / 3.0, "n": 7, "s": "x"}));
        assert_eq!(v, json!({"a": 0.333333333, "n": 7, "s": "x"}));
    }

    #[test]
    fn envelope_leads_with_version() {
        let v = envelope("bounds", json!({"a2_bound": 1.0}));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["schema_version", "command", "a2_bound"]);
    }

    #[test]
    fn flatten_nests_with_dots() {
        let v = json!({"a": {"b": 1}, "c": [true, null], "worst_z": [0.5, -1.0]});
        assert_eq!(
            flatten(&v),
            vec![
                ("a.b".to_string(), "1".to_string()),
                ("c.0".to_string(), "true".to_string()),
                ("c.1".to_string(), String::new()),
                ("worst_z".to_string(), "0.5-1.0i".to_string()),
            ]
        );
    }
}
