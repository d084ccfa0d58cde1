//! Tabular output (CSV / JSON) and sample-file input.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    UInt(u64),
    Int(i64),
    Float(f64),
}

impl Cell {
    /// CSV text. Floats use 17 significant digits so they parse back bit-exactly.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::UInt(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) if v.is_nan() => "NaN".into(),
            Cell::Float(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::UInt(v) => Value::from(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::LengthMismatch {
                expected: self.headers.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let parse_err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(&self.headers).map_err(parse_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(parse_err)?;
        }
        w.into_inner().map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows).map_err(|e| Error::Parse(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes `table` to `dest`, or stdout when `dest` is `None` or `-`. File
/// writes go through a temporary sibling that is renamed into place.
pub fn write_output(table: &Table, format: Format, dest: Option<&Path>) -> Result<()> {
    let bytes = table.render(format)?;
    match dest {
        None => write_stdout(&bytes),
        Some(p) if p.as_os_str() == "-" => write_stdout(&bytes),
        Some(p) => write_atomic(p, &bytes),
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Reads a CSV with (at least) `x`, `y` and `value` columns.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = r
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse(format!("{}: missing column '{name}'", path.display())))
    };
    let (cx, cy, cv) = (col("x")?, col("y")?, col("value")?);
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let num = |c: usize| -> Result<f64> {
            let s = rec.get(c).unwrap_or("");
            s.parse().map_err(|_| {
                Error::Parse(format!("{}: row {}: '{s}' is not a number", path.display(), line + 2))
            })
        };
        out.push((num(cx)?, num(cy)?, num(cv)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> Table {
        let mut t = Table::new(["name", "k", "v"]);
        t.push(vec![Cell::Text("a".into()), Cell::UInt(3), Cell::Float(0.1)]).unwrap();
        t.push(vec![Cell::Text("b".into()), Cell::UInt(4), Cell::Float(std::f64::consts::PI)]).unwrap();
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["x", "y"]);
        assert_eq!(t.to_csv().unwrap(), b"x,y\n");
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 5e-324] {
            let s = Cell::Float(v).to_csv();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        let csv = String::from_utf8(sample_table().to_csv().unwrap()).unwrap();
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().nth(2).unwrap(), "b,4,3.1415926535897931e0");
    }

    #[test]
    fn json_is_array_of_objects() {
        let v: Value = serde_json::from_slice(&sample_table().to_json().unwrap()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        let keys: Vec<&String> = arr[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["name", "k", "v"]);
        assert_eq!(arr[1]["v"].as_f64().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn writes_are_deterministic_and_readable() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(["x", "y", "value"]);
        t.push(vec![Cell::Float(-1.0), Cell::Float(0.5), Cell::Float(0.25)]).unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_output(&t, Format::Csv, Some(&a)).unwrap();
        write_output(&t, Format::Csv, Some(&b)).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(read_samples(&a).unwrap(), vec![(-1.0, 0.5, 0.25)]);
        assert!(write_output(&t, Format::Csv, Some(&dir.path().join("missing/x.csv"))).is_err());
    }

    #[test]
    fn row_length_checked() {
        let mut t = Table::new(["a"]);
        assert!(t.push(vec![]).is_err());
    }

    #[test]
    fn bad_sample_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "x,y\n0,0\n").unwrap();
        assert!(read_samples(&p).is_err());
        std::fs::write(&p, "x,y,value\n0,zero,1\n").unwrap();
        assert!(read_samples(&p).is_err());
    }
}
