//! Persisted formats: per-replication CSV records and JSON summaries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::chaos::ChaosRecord;
use crate::error::{Error, Result};

/// First line of every records file; the number is the schema version.
pub const RECORDS_HEADER: &str = "# nodal-lab records v1";

const COLUMNS: [&str; 12] = [
    "replication_index",
    "E",
    "nodal_len",
    "h4",
    "m_stat",
    "a1",
    "a2",
    "a3",
    "a4",
    "a5",
    "a6",
    "l4",
];

/// Appends records to a CSV file, flushing after every batch so that an
/// interrupted run leaves complete rows behind.
pub struct RecordWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{RECORDS_HEADER}").map_err(|e| Error::io(path, e))?;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(COLUMNS)?;
        Ok(Self {
            path: path.to_path_buf(),
            inner,
        })
    }

    pub fn append(&mut self, records: &[ChaosRecord]) -> Result<()> {
        for r in records {
            self.inner.serialize(r)?;
        }
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_records(path: &Path, records: &[ChaosRecord]) -> Result<()> {
    RecordWriter::create(path)?.append(records)
}

/// Read a records file. Any malformed row is reported with its 1-based line
/// number.
pub fn read_records(path: &Path) -> Result<Vec<ChaosRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let parse = |row: usize, message: String| Error::Parse {
        file: path.to_path_buf(),
        row,
        message,
    };
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(path, e))?;
    let first = first.trim_end();
    if first != RECORDS_HEADER {
        return Err(parse(1, format!("expected `{RECORDS_HEADER}`, found `{first}`")));
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse(2, e.to_string()))?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(parse(2, format!("unexpected columns {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        // csv counts lines after the version line
        let row = row.map_err(|e| parse(e.position().map_or(0, |p| p.line() as usize + 1), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize + 1);
        let rec: ChaosRecord = row.deserialize(Some(&headers)).map_err(|e| parse(line, e.to_string()))?;
        let values = [rec.energy, rec.nodal_len, rec.h4, rec.m_stat, rec.a1, rec.a2, rec.a3, rec.a4, rec.a5, rec.a6, rec.l4];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(parse(line, "non-finite value".into()));
        }
        if !(rec.energy > 0.0) {
            return Err(parse(line, format!("energy {} is not positive", rec.energy)));
        }
        out.push(rec);
    }
    if out.is_empty() {
        return Err(parse(0, "no records".into()));
    }
    Ok(out)
}

pub fn write_summary<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}
