use std::io::Read;
use std::path::Path;

use super::config::ColumnSelector;
use crate::error::{Error, Result};
use crate::sample::Sample;

fn split_line(line: &str, line_no: usize) -> Result<csv::StringRecord> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(line.as_bytes());
    match reader.records().next() {
        Some(Ok(record)) => Ok(record),
        Some(Err(e)) => Err(Error::Parse { line: line_no, message: e.to_string() }),
        None => Ok(csv::StringRecord::new()),
    }
}

/// Reads one numeric column from CSV text. Blank lines are skipped; any
/// cell that is missing or not a finite number is an error naming its line.
pub fn read_column<R: Read>(mut reader: R, column: &ColumnSelector, header: bool) -> Result<Vec<f64>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    let mut index = match column {
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(_) => None,
    };
    let mut values = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let record = split_line(raw, line)?;
        if std::mem::take(&mut first) && header {
            if let ColumnSelector::Name(name) = column {
                index = Some(record.iter().position(|c| c == name).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("no column named '{name}' in the header"),
                })?);
            }
            continue;
        }
        let i = index.expect("column resolved from the header");
        let cell = record.get(i).ok_or_else(|| Error::Parse {
            line,
            message: format!("row has {} fields, column {i} missing", record.len()),
        })?;
        let value: f64 = cell.parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse '{cell}' as a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse { line, message: format!("non-finite value '{cell}'") });
        }
        values.push(value);
    }
    Ok(values)
}

pub fn load_sample(path: &Path, column: &ColumnSelector, header: bool) -> Result<Sample> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let values = read_column(std::io::BufReader::new(file), column, header)?;
    if values.len() < 2 {
        return Err(Error::invalid(format!(
            "{} holds {} value(s); at least 2 are needed",
            path.display(),
            values.len()
        )));
    }
    Sample::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn by_index_and_by_name() {
        let text = "\u{feff}id,score\r\n1,3.5\n\n2, 4\n3,\"-1e2\"\n";
        let by_name = read_column(text.as_bytes(), &ColumnSelector::Name("score".into()), true).unwrap();
        assert_eq!(by_name, vec![3.5, 4.0, -100.0]);
        let by_index = read_column(text.as_bytes(), &ColumnSelector::Index(1), true).unwrap();
        assert_eq!(by_index, by_name);
        let ids = read_column(text.as_bytes(), &ColumnSelector::Name("id".into()), true).unwrap();
        assert_eq!(ids, vec![1.0, 2.0, 3.0]);
        let plain = read_column("1\n2\n3\n".as_bytes(), &ColumnSelector::Index(0), false).unwrap();
        assert_eq!(plain, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_cells_name_their_line() {
        let err = read_column("1\n2\n\nabc\n".as_bytes(), &ColumnSelector::Index(0), false).unwrap_err();
        assert_eq!(err, Error::Parse { line: 4, message: "cannot parse 'abc' as a number".into() });
        let err = read_column("1,2\n3\n".as_bytes(), &ColumnSelector::Index(1), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_column("x\nnan\n".as_bytes(), &ColumnSelector::Index(0), true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_column("a,b\n1,2\n".as_bytes(), &ColumnSelector::Name("c".into()), true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
