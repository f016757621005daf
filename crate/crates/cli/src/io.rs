//! Matrix and vector readers for CSV and MatrixMarket array files.

use std::fs;
use std::path::Path;

use rspcert_core::DenseMatrix;

use crate::error::CliError;

const MM_HEADER: &str = "%%MatrixMarket matrix array real general";

fn parse_error(path: &Path, line: u64, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn parse_entry(path: &Path, line: u64, column: usize, field: &str) -> Result<f64, CliError> {
    let v: f64 = field.trim().parse().map_err(|_| {
        parse_error(
            path,
            line,
            column,
            format!("expected a number, found {:?}", field.trim()),
        )
    })?;
    if !v.is_finite() {
        return Err(parse_error(path, line, column, "entry is not finite"));
    }
    Ok(v)
}

/// Parses comma-separated rows. Blank lines are skipped.
pub fn parse_csv(path: &Path, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, 0, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, f)| parse_entry(path, line, c + 1, f))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    path,
                    line,
                    row.len().min(first.len()) + 1,
                    format!("expected {} entries, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, 1, "no data"));
    }
    Ok(rows)
}

/// Parses the dense MatrixMarket array format (column-major entries).
pub fn parse_matrix_market(path: &Path, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, 1, "empty file"))?;
    if !header.eq_ignore_ascii_case(MM_HEADER) {
        return Err(parse_error(
            path,
            1,
            1,
            format!("unsupported header, expected {MM_HEADER:?}"),
        ));
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_error(path, 2, 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_error(path, size_line, 1, "size line must be two integers"))?;
    let [m, n] = dims[..] else {
        return Err(parse_error(
            path,
            size_line,
            1,
            "size line must be two integers",
        ));
    };
    let mut values = Vec::with_capacity(m * n);
    let mut last_line = size_line;
    for (line, l) in body {
        last_line = line;
        for (c, tok) in l.split_whitespace().enumerate() {
            values.push(parse_entry(path, line, c + 1, tok)?);
        }
    }
    if values.len() != m * n {
        return Err(parse_error(
            path,
            last_line,
            1,
            format!("expected {} entries, found {}", m * n, values.len()),
        ));
    }
    Ok((0..m)
        .map(|i| (0..n).map(|j| values[j * m + i]).collect())
        .collect())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(path, &text)
    } else {
        parse_csv(path, &text)
    }
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    Ok(DenseMatrix::from_rows(&read_rows(path)?)?)
}

/// Reads a vector stored as a single column (or a single row).
pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let rows = read_rows(path)?;
    if rows.iter().all(|r| r.len() == 1) {
        Ok(rows.into_iter().map(|r| r[0]).collect())
    } else if rows.len() == 1 {
        Ok(rows.into_iter().next().unwrap())
    } else {
        Err(parse_error(path, 1, 2, "expected a single column"))
    }
}

pub fn expect_len(path: &Path, v: &[f64], len: usize, what: &str) -> Result<(), CliError> {
    if v.len() != len {
        return Err(CliError::Usage(format!(
            "{}: {what} has {} entries, expected {len}",
            path.display(),
            v.len()
        )));
    }
    Ok(())
}
