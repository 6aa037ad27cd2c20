use std::io::{self, Write};

use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::{Map, Value};

/// Scientific notation with 17 significant digits; negative zero prints as
/// zero.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
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

/// A data table with metadata, emitted as '#'-commented CSV or as JSON.
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<(&'static str, &'static str)>) -> Self {
        Table { command, meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, v: impl Into<Value>) {
        self.meta.push((key.into(), v.into()));
    }

    pub fn csv(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let _ = writeln!(out, "# cylwave {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", plain(v));
        }
        let units: Vec<String> = self.columns.iter().map(|(c, u)| format!("{c} [{u}]")).collect();
        let _ = writeln!(out, "# units: {}", units.join(", "));
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            let _ = w.write_record(self.columns.iter().map(|(c, _)| *c));
            for r in &self.rows {
                let _ = w.write_record(r.iter().map(Cell::csv));
            }
            let _ = w.flush();
        }
        out
    }

    pub fn json(&self) -> Value {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.clone());
        }
        let mut units = Map::new();
        for (c, u) in &self.columns {
            units.insert((*c).into(), Value::from(*u));
        }
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        serde_json::json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "metadata": meta,
            "columns": self.columns.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
            "units": units,
            "rows": rows,
        })
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => num(x),
            _ => n.to_string(),
        },
        Value::Object(o) => o.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Compact JSON whose floats use the fixed scientific format.
struct SciFormatter {
    inner: CompactFormatter,
    depth: usize,
    fresh: bool,
}

impl SciFormatter {
    fn indent<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.depth {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        w.write_all(num(value as f64).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth += 1;
        self.fresh = true;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth -= 1;
        if !self.fresh {
            self.indent(w)?;
        }
        self.fresh = false;
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.fresh = false;
        self.indent(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth += 1;
        self.fresh = true;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth -= 1;
        if !self.fresh {
            self.indent(w)?;
        }
        self.fresh = false;
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.fresh = false;
        self.indent(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)?;
        w.write_all(b" ")
    }
}

pub fn to_json_bytes(v: &Value) -> Result<Vec<u8>, serde_json::Error> {
    let mut out = Vec::new();
    let fmt = SciFormatter { inner: CompactFormatter, depth: 0, fresh: false };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    serde::Serialize::serialize(v, &mut ser)?;
    out.push(b'\n');
    Ok(out)
}
