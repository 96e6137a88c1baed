//! Deterministic JSON and CSV rendering. Floats carry 17 significant
//! digits; non-finite values are written as the strings `inf`, `-inf`, `nan`.

use std::str::FromStr;

use serde_json::{Number, Value};

use crate::error::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(x)).expect("finite float text is a JSON number"))
    } else {
        Value::String(fmt_f64(x))
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form lines after the table.
    pub trailer: Vec<String>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new(), trailer: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

pub enum Document {
    Json(Value),
    Csv(Table),
}

impl Document {
    pub fn render(&self) -> CliResult<String> {
        match self {
            Document::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Document::Csv(t) => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                w.write_record(&t.header).map_err(|e| CliError::Output(e.to_string()))?;
                for row in &t.rows {
                    let cells = row.iter().map(|c| match c {
                        Cell::Num(x) => fmt_f64(*x),
                        Cell::Text(s) => s.clone(),
                    });
                    w.write_record(cells).map_err(|e| CliError::Output(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
                let mut s = String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))?;
                for line in &t.trailer {
                    s.push_str(line);
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}
