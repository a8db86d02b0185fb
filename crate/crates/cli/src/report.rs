//! Tabular results rendered as CSV or JSON.

use serde_json::{json, Map, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 15 significant digits in scientific notation; independent of locale.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.14e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    /// Column name and units.
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[(&'static str, &'static str)]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command reports.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub table: Table,
    /// Scalar results: name, value, units.
    pub summary: Vec<(&'static str, Cell, &'static str)>,
    pub diagnostics: Map<String, Value>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Map::new(),
            table: Table::default(),
            summary: Vec::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    pub fn scalar(&mut self, name: &'static str, value: impl Into<Cell>, units: &'static str) {
        self.summary.push((name, value.into(), units));
    }

    /// The main table, then a blank line and `quantity,value,units` rows.
    pub fn to_csv(&self) -> String {
        let mut blocks = Vec::new();
        if !self.table.columns.is_empty() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(self.table.columns.iter().map(|c| c.0))
                .unwrap();
            for row in &self.table.rows {
                w.write_record(row.iter().map(Cell::csv)).unwrap();
            }
            blocks.push(w.into_inner().unwrap());
        }
        if !self.summary.is_empty() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value", "units"]).unwrap();
            for (name, value, units) in &self.summary {
                w.write_record([name.to_string(), value.csv(), units.to_string()])
                    .unwrap();
            }
            blocks.push(w.into_inner().unwrap());
        }
        String::from_utf8(blocks.join(&b"\n"[..])).unwrap()
    }

    pub fn to_json_value(&self) -> Value {
        let mut results = Map::new();
        if !self.table.columns.is_empty() {
            let rows: Vec<Value> = self
                .table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|((name, _), c)| (name.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            results.insert("rows".into(), Value::Array(rows));
        }
        let mut units = Map::new();
        for (name, u) in &self.table.columns {
            units.insert(name.to_string(), json!(u));
        }
        for (name, value, u) in &self.summary {
            results.insert(name.to_string(), value.json());
            units.insert(name.to_string(), json!(u));
        }
        results.insert("units".into(), Value::Object(units));
        json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs.clone()),
            "results": Value::Object(results),
            "diagnostics": Value::Object(self.diagnostics.clone()),
        })
    }

    pub fn to_json(&self) -> String {
        pretty(&self.to_json_value())
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
