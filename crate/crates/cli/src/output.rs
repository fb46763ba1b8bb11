//! Rendering of command results as JSON or CSV.

use serde_json::{Map, Value};
use std::f64::consts::LN_2;

/// Rounds to nine significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 {
        // also folds -0.0, which an empty f64 sum produces
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig9(x)).map(Value::Number).unwrap_or(Value::Null)
}

/// Rate display unit.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn rate(self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    /// `stem` with the unit appended, e.g. `sum_rate_nats`.
    pub fn key(self, stem: &str) -> String {
        format!("{stem}_{}", self.name())
    }

    pub fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

/// A result with a JSON form and a flat table for CSV.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Drives exit status 2.
    pub failed: bool,
}

impl Report {
    pub fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            failed: false,
        }
    }

    pub fn render(&self, csv_format: bool) -> Result<String, String> {
        if !csv_format {
            let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| e.to_string())?;
            s.push('\n');
            return Ok(s);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }
}

/// Nine-digit text form used in CSV cells.
pub fn cell(x: f64) -> String {
    sig9(x).to_string()
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(0.656_283_897_37), 0.656283897);
        assert_eq!(cell(1.5 * LN_2), "1.03972077");
        assert_eq!(cell(0.0), "0");
        assert_eq!(cell(-0.0), "0");
        assert_eq!(cell(1e-20), "0.00000000000000000001");
    }
}
