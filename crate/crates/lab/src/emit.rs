//! Byte-stable CSV, JSON and binary output.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which reads back
//! to the same `f64`. Lines end in `\n`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{LabError, LabResult};

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON with fixed float formatting. Non-finite floats become `null`.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serialize to compact JSON followed by a newline.
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> LabResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// A CSV cell.
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
        }
    }
}

/// Rows of a CSV table with a mandatory header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> LabResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| LabError::io("<csv buffer>", e.into_error()))
    }
}

/// Writes named artifacts into one output directory.
pub struct Emitter {
    dir: PathBuf,
}

impl Emitter {
    pub fn new(dir: &Path) -> LabResult<Self> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn bytes(&self, name: &str, data: &[u8]) -> LabResult<PathBuf> {
        let p = self.path(name);
        fs::write(&p, data).map_err(|e| LabError::io(&p, e))?;
        Ok(p)
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> LabResult<Vec<u8>> {
        let b = to_json_bytes(value)?;
        self.bytes(name, &b)?;
        Ok(b)
    }

    pub fn csv(&self, name: &str, table: &Table) -> LabResult<()> {
        self.bytes(name, &table.to_bytes()?)?;
        Ok(())
    }

    /// Flat little-endian `f64` array.
    pub fn f64_array(&self, name: &str, values: &[f64]) -> LabResult<()> {
        let data: Vec<u8> = values.iter().flat_map(|x| x.to_le_bytes()).collect();
        self.bytes(name, &data)?;
        Ok(())
    }
}

/// Inverse of [`Emitter::f64_array`].
pub fn read_f64_array(path: &Path) -> LabResult<Vec<f64>> {
    let data = fs::read(path).map_err(|e| LabError::io(path, e))?;
    if data.len() % 8 != 0 {
        return Err(LabError::Invalid(format!("{}: length {} is not a multiple of 8", path.display(), data.len())));
    }
    Ok(data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}
