//! CSV output with platform-stable formatting: UTF-8, `\n` line endings,
//! floats at 17 significant digits so reruns are byte-identical and values
//! round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

/// A float, exactly re-readable: 17 significant digits in scientific form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    buf: Vec<u8>,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> CsvWriter {
        let mut buf = Vec::new();
        let _ = writeln!(buf, "{}", header.join(","));
        CsvWriter { buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "ragged CSV row");
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, &self.buf)
    }
}

/// Minimal reader for the toolkit's own artifacts: no quoting, first line is
/// the header.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_csv(path: &Path) -> std::io::Result<CsvTable> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok(CsvTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_formatter() {
        for x in [0.1, 1.0 / 3.0, 123456.789, 2f64.powi(-40), core::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn writer_and_reader_agree() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut w = CsvWriter::new(&["a", "b"]);
        w.row(&["1".into(), fmt_f64(0.5)]);
        w.write_to(&path).unwrap();
        let t = read_csv(&path).unwrap();
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][1].parse::<f64>().unwrap(), 0.5);
    }
}
