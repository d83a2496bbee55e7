use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
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

impl Cell {
    /// 17 significant digits, so a parsed value round-trips exactly.
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(v.to_string())),
            Cell::Int(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// Writer that keeps a running SHA-256 of everything written through it.
struct Hashing<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for Hashing<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Row-at-a-time table writer. CSV gets a header line; JSON is an array of
/// objects keyed by column name, one per line. Every row is flushed as soon
/// as it is written.
pub struct TableWriter {
    format: Format,
    columns: Vec<&'static str>,
    out: Hashing<Box<dyn Write>>,
    rows: usize,
}

impl TableWriter {
    pub fn new(format: Format, columns: Vec<&'static str>, sink: Box<dyn Write>) -> Result<Self> {
        let mut out = Hashing {
            inner: sink,
            hasher: Sha256::new(),
        };
        match format {
            Format::Csv => writeln!(out, "{}", columns.join(","))?,
            Format::Json => writeln!(out, "[")?,
        }
        out.flush()?;
        Ok(TableWriter {
            format,
            columns,
            out,
            rows: 0,
        })
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> Result<()> {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        match self.format {
            Format::Csv => {
                let line: Vec<String> = cells.iter().map(Cell::csv).collect();
                writeln!(self.out, "{}", line.join(","))?;
            }
            Format::Json => {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(&cells) {
                    obj.insert((*name).to_string(), cell.json());
                }
                let sep = if self.rows == 0 { "" } else { "," };
                writeln!(self.out, "{sep}{}", serde_json::Value::Object(obj))?;
            }
        }
        self.rows += 1;
        self.out.flush()?;
        Ok(())
    }

    /// Closes the table and returns the hex SHA-256 of the bytes written.
    pub fn finish(mut self) -> Result<String> {
        if self.format == Format::Json {
            writeln!(self.out, "]")?;
        }
        self.out.flush()?;
        Ok(hex::encode(self.out.hasher.finalize()))
    }
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full command line, minus the program name.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seed: u64,
    pub trials: u64,
    pub threads: usize,
    pub format: Format,
    pub wall_clock_seconds: f64,
    pub version: String,
    /// SHA-256 of the output file; empty until the run completes.
    pub sha256: String,
    pub complete: bool,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(io::stdout()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::{Arc, Mutex};

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    fn render(format: Format, rows: Vec<Vec<Cell>>) -> (String, String) {
        let buf = Shared::default();
        let mut t = TableWriter::new(format, vec!["a", "b"], Box::new(buf.clone())).unwrap();
        for r in rows {
            t.row(r).unwrap();
        }
        let digest = t.finish().unwrap();
        let text = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
        (text, digest)
    }

    #[test]
    fn csv_floats_round_trip() {
        let x = 0.1 + 0.2;
        let (text, digest) = render(Format::Csv, vec![vec![x.into(), "ok".into()]]);
        assert_eq!(text, "a,b\n3.0000000000000004e-1,ok\n");
        let parsed: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(parsed, x);
        assert_eq!(digest, hex::encode(Sha256::digest(text.as_bytes())));
    }

    #[test]
    fn json_is_valid_and_matches_csv() {
        let rows = vec![vec![1.5.into(), Cell::Empty], vec![Cell::Int(3), "x,y".into()]];
        let (json, _) = render(Format::Json, rows.clone());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["a"], 1.5);
        assert!(v[0]["b"].is_null());
        assert_eq!(v[1]["b"], "x,y");
        let (csv, _) = render(Format::Csv, rows);
        assert_eq!(csv, "a,b\n1.5000000000000000e0,\n3,\"x,y\"\n");
        let (empty, _) = render(Format::Json, vec![]);
        assert_eq!(serde_json::from_str::<serde_json::Value>(&empty).unwrap(), serde_json::json!([]));
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("/tmp/x.csv")), PathBuf::from("/tmp/x.csv.manifest.json"));
    }
}
