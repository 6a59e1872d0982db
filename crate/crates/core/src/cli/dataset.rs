//! Delimited-text ingestion of expenditure or income values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Which column holds the values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    /// Header name, matched exactly.
    Name(String),
    /// Zero-based field index.
    Index(usize),
}

impl ColumnSelector {
    /// All-digit strings select by index, anything else by header name.
    pub fn parse(s: &str) -> ColumnSelector {
        match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        }
    }
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestedDataset {
    pub values: Vec<f64>,
    pub source: PathBuf,
    /// Rows whose field was missing, non-numeric, non-finite or `<= 0`.
    pub dropped: usize,
}

fn sniff_delimiter(text: &str) -> u8 {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    b",\t;"
        .iter()
        .copied()
        .find(|&d| first.as_bytes().contains(&d))
        .unwrap_or(b',')
}

/// Reads one numeric column, keeping strictly positive finite values.
///
/// With [`ColumnSelector::Name`] the first row is the header. With an index
/// the first row is treated as a header only when its field is not numeric.
pub fn ingest_dataset(path: &Path, column: &ColumnSelector) -> Result<IngestedDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ingest_text(&text, path, column)
}

pub(crate) fn ingest_text(
    text: &str,
    path: &Path,
    column: &ColumnSelector,
) -> Result<IngestedDataset> {
    let bad = |message: String| Error::Dataset {
        path: path.to_path_buf(),
        message,
    };
    if text.trim().is_empty() {
        return Err(bad("file is empty".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(sniff_delimiter(text))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let mut index = match column {
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(_) => None,
    };
    let mut pending = None;

    let first = records
        .next()
        .transpose()
        .map_err(|e| bad(format!("unreadable row: {e}")))?
        .ok_or_else(|| bad("file is empty".into()))?;
    match column {
        ColumnSelector::Name(name) => {
            index = Some(
                first
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| bad(format!("no column named `{name}` in header")))?,
            );
        }
        ColumnSelector::Index(i) => {
            let is_header = first
                .get(*i)
                .is_some_and(|f| !f.is_empty() && f.parse::<f64>().is_err());
            if !is_header {
                pending = Some(first);
            }
        }
    }
    let index = index.expect("set above");

    let mut values = Vec::new();
    let mut dropped = 0usize;
    for record in pending.into_iter().map(Ok).chain(records) {
        let record = record.map_err(|e| bad(format!("unreadable row: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        match record.get(index).and_then(|f| f.parse::<f64>().ok()) {
            Some(v) if v > 0.0 && v.is_finite() => values.push(v),
            _ => dropped += 1,
        }
    }
    if values.is_empty() {
        return Err(bad(format!(
            "no valid positive values in column {column:?} ({dropped} rows dropped)"
        )));
    }
    Ok(IngestedDataset {
        values,
        source: path.to_path_buf(),
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, column: ColumnSelector) -> Result<IngestedDataset> {
        ingest_text(text, Path::new("mem.csv"), &column)
    }

    #[test]
    fn drops_non_positive_rows() {
        let d = ingest("1\n2\n-3\n4\n", ColumnSelector::Index(0)).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 4.0]);
        assert_eq!(d.dropped, 1);
    }

    #[test]
    fn empty_file_is_error() {
        assert!(ingest("", ColumnSelector::Index(0)).is_err());
        assert!(ingest("  \n\n", ColumnSelector::Index(0)).is_err());
        assert!(ingest("x\n-1\nabc\n", ColumnSelector::Index(0)).is_err());
    }

    #[test]
    fn header_name_exact_match() {
        let text = "id,expenditure,expenditure_total\n1,10.5,99\n2,abc,98\n3,0,97\n4,7,96\n";
        let d = ingest(text, ColumnSelector::Name("expenditure".into())).unwrap();
        assert_eq!(d.values, vec![10.5, 7.0]);
        assert_eq!(d.dropped, 2);
        assert!(ingest(text, ColumnSelector::Name("Expenditure".into())).is_err());
    }

    #[test]
    fn index_skips_textual_header() {
        let d = ingest("a\tb\n1\t2\n3\t4\n", ColumnSelector::Index(1)).unwrap();
        assert_eq!(d.values, vec![2.0, 4.0]);
        assert_eq!(d.dropped, 0);
        let d = ingest("1;5\n2\n", ColumnSelector::Index(1)).unwrap();
        assert_eq!((d.values.clone(), d.dropped), (vec![5.0], 1));
    }

    #[test]
    fn selector_parse() {
        assert_eq!(ColumnSelector::parse("2"), ColumnSelector::Index(2));
        assert_eq!(
            ColumnSelector::parse("mpce"),
            ColumnSelector::Name("mpce".into())
        );
    }
}
