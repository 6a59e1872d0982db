use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::statistics::{CcdfCurve, Histogram};

/// Fixed 17-significant-digit formatting; parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_histogram_csv(path: &Path, hist: &Histogram) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "bin_left,bin_right,count,density").map_err(io)?;
    for (k, d) in hist.density().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            format_float(hist.edges[k]),
            format_float(hist.edges[k + 1]),
            hist.counts[k],
            format_float(*d)
        )
        .map_err(io)?;
    }
    finish(path, w)
}

pub fn write_ccdf_csv(path: &Path, curve: &CcdfCurve) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "w,fraction").map_err(io)?;
    for (x, f) in &curve.points {
        writeln!(w, "{},{}", format_float(*x), format_float(*f)).map_err(io)?;
    }
    finish(path, w)
}

pub(crate) fn write_rows(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    finish(path, w)
}

pub(crate) fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(path, w)
}

/// Tracks files written by a command so a failure can remove them.
#[derive(Debug, Default)]
pub(crate) struct OutputSet {
    written: Vec<PathBuf>,
}

impl OutputSet {
    pub(crate) fn record(&mut self, path: PathBuf) -> PathBuf {
        self.written.push(path.clone());
        path
    }

    pub(crate) fn discard(self) {
        for p in self.written {
            let _ = std::fs::remove_file(p);
        }
    }

    pub(crate) fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub(crate) fn absorb(&mut self, other: OutputSet) {
        self.written.extend(other.written);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 123456.789, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }
}
