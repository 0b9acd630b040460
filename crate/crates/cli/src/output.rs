//! Number formatting and rendering of command results.

use serde_json::{Map, Number, Value};

/// JSON number with 17 significant digits; `null` for NaN and infinities.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let text = format!("{v:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is a valid JSON number"))
}

pub fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Builds a JSON object from `(key, value)` pairs.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

/// A table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| csv_num(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.header.iter().zip(r).map(|(h, v)| (h.to_string(), num(*v))).collect()))
                .collect(),
        )
    }
}

/// Result of one command: a JSON record and, for some commands, a table.
#[derive(Debug, Clone)]
pub struct Output {
    pub record: Value,
    pub table: Option<Table>,
}

impl Output {
    pub fn record(record: Value) -> Self {
        Output { record, table: None }
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.record).expect("JSON values serialise");
        s.push('\n');
        s
    }

    /// The table if there is one, else the record's scalar fields as a
    /// two-line CSV.
    pub fn csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let Value::Object(map) = &self.record else {
            return String::new();
        };
        let scalars: Vec<(&String, &Value)> = map.iter().filter(|(_, v)| !v.is_object() && !v.is_array()).collect();
        let header: Vec<&str> = scalars.iter().map(|(k, _)| k.as_str()).collect();
        let cells: Vec<String> = scalars
            .iter()
            .map(|(_, v)| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        format!("{}\n{}\n", header.join(","), cells.join(","))
    }
}
