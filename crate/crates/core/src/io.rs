//! CSV output: one `#` comment line holding a JSON header, one column
//! header line, then rows printed with the shortest round-trip formatting so
//! identical inputs give byte-identical files.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

pub fn write_csv<W, H, R>(out: &mut W, header: &H, columns: &[&str], rows: R) -> Result<()>
where
    W: Write,
    H: Serialize + ?Sized,
    R: IntoIterator<Item = Vec<f64>>,
{
    let json = serde_json::to_string(header).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(out, "# {json}").map_err(|e| Error::Config(format!("write failed: {e}")))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(columns).map_err(csv_err)?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Config(format!("row has {} fields, expected {}", row.len(), columns.len())));
        }
        w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("write failed: {e}")))?;
    Ok(())
}

/// Parses a file produced by [`write_csv`] into its header JSON, column names and rows.
pub fn read_csv(text: &str) -> Result<(serde_json::Value, Vec<String>, Vec<Vec<f64>>)> {
    let first = text.lines().next().and_then(|l| l.strip_prefix("# ")).ok_or_else(|| Error::Config("missing header line".into()))?;
    let header = serde_json::from_str(first).map_err(|e| Error::Config(e.to_string()))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec.iter().map(|x| x.parse::<f64>().map_err(|e| Error::Config(format!("{x}: {e}")))).collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok((header, columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        let rows = vec![vec![0.1, 1e-300], vec![f64::MAX, -2.5]];
        write_csv(&mut buf, &serde_json::json!({"k": 1}), &["a", "b"], rows.clone()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# {\"k\":1}\na,b\n"));
        let (h, cols, back) = read_csv(&text).unwrap();
        assert_eq!(h["k"], 1);
        assert_eq!(cols, vec!["a", "b"]);
        assert_eq!(back, rows);
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut buf = Vec::new();
        assert!(write_csv(&mut buf, &(), &["a"], vec![vec![1.0, 2.0]]).is_err());
    }
}
