use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Writes named columns with a header row. Values use the shortest decimal
/// form that reads back to the same number.
pub fn write_csv<T: Real, W: Write>(writer: W, columns: &[(&str, &[T])]) -> Result<()> {
    let Some(first) = columns.first() else {
        return Err(Error::param("columns", "at least one column is required"));
    };
    let rows = first.1.len();
    if let Some((_, bad)) = columns.iter().find(|(_, c)| c.len() != rows) {
        return Err(Error::LengthMismatch {
            left: rows,
            right: bad.len(),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(columns.iter().map(|(name, _)| *name))?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|(_, c)| c[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv<T: Real>(path: impl AsRef<Path>, columns: &[(&str, &[T])]) -> Result<()> {
    write_csv(File::create(path)?, columns)
}

pub fn read_csv<T: Real, R: Read>(reader: R) -> Result<Vec<(String, Vec<T>)>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut columns: Vec<(String, Vec<T>)> = r
        .headers()?
        .iter()
        .map(|h| (h.trim().to_string(), Vec::new()))
        .collect();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        for ((name, col), field) in columns.iter_mut().zip(record.iter()) {
            let v = field.trim().parse::<T>().map_err(|_| {
                Error::Csv(csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("row {}: column `{name}`: invalid number `{field}`", row + 2),
                )))
            })?;
            col.push(v);
        }
    }
    Ok(columns)
}

pub fn import_csv<T: Real>(path: impl AsRef<Path>) -> Result<Vec<(String, Vec<T>)>> {
    read_csv(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_when_empty() {
        let mut buf = Vec::new();
        write_csv::<f64, _>(&mut buf, &[("time", &[]), ("raw", &[])]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,raw\n");
        let mut buf = Vec::new();
        assert!(write_csv::<f64, _>(&mut buf, &[]).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let t = [0.0, 1.0 / 30.0, 2.0 / 30.0];
        let x = [0.1 + 0.2, -1e-300, 12345.678901234567];
        let mut buf = Vec::new();
        write_csv(&mut buf, &[("time", &t[..]), ("raw", &x[..])]).unwrap();
        let cols: Vec<(String, Vec<f64>)> = read_csv(&buf[..]).unwrap();
        assert_eq!(cols[0], ("time".to_string(), t.to_vec()));
        assert_eq!(cols[1], ("raw".to_string(), x.to_vec()));
    }

    #[test]
    fn length_mismatch() {
        let mut buf = Vec::new();
        let r = write_csv(&mut buf, &[("a", &[1.0][..]), ("b", &[1.0, 2.0][..])]);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }
}
