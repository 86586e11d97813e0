//! Plain-text matrix and vector files.
//!
//! A matrix file starts with a `rows cols` header followed by one line per row;
//! a vector file starts with its length followed by one value per line. Lines
//! whose first non-blank character is `#`, and blank lines, are skipped. Values
//! are written with 17 significant digits so a write/read round trip is exact.

use std::fs;
use std::path::Path;

use l1rev_core::bench::fmt_f64;
use l1rev_core::linalg::Matrix;

use crate::CliError;

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_value(path: &Path, line: usize, tok: &str) -> Result<f64, CliError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(parse_err(path, line, format!("non-finite value '{tok}'"))),
        Err(_) => Err(parse_err(path, line, format!("'{tok}' is not a number"))),
    }
}

fn parse_count(path: &Path, line: usize, tok: &str) -> Result<usize, CliError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("'{tok}' is not a non-negative integer")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn parse_matrix(path: &Path, text: &str) -> Result<Matrix, CliError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "missing 'rows cols' header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(path, hline, format!("header '{header}' must be 'rows cols'")));
    }
    let rows = parse_count(path, hline, dims[0])?;
    let cols = parse_count(path, hline, dims[1])?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        seen += 1;
        if seen > rows {
            return Err(parse_err(
                path,
                ln,
                format!("more than the {rows} rows declared in the header"),
            ));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_value(path, ln, tok)?);
        }
        let got = data.len() - before;
        if got != cols {
            return Err(parse_err(path, ln, format!("expected {cols} values, found {got}")));
        }
    }
    if seen != rows {
        return Err(parse_err(
            path,
            0,
            format!("header declares {rows} rows, file has {seen}"),
        ));
    }
    Matrix::from_vec(rows, cols, data).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn parse_vector(path: &Path, text: &str) -> Result<Vec<f64>, CliError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "missing length header"))?;
    let len = parse_count(path, hline, header)?;
    let mut out = Vec::with_capacity(len);
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 1 {
            return Err(parse_err(path, ln, format!("expected one value, found {}", toks.len())));
        }
        if out.len() == len {
            return Err(parse_err(
                path,
                ln,
                format!("more than the {len} values declared in the header"),
            ));
        }
        out.push(parse_value(path, ln, toks[0])?);
    }
    if out.len() != len {
        return Err(parse_err(
            path,
            0,
            format!("header declares {len} values, file has {}", out.len()),
        ));
    }
    Ok(out)
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    parse_matrix(path, &read_text(path)?)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    parse_vector(path, &read_text(path)?)
}

pub fn format_matrix(a: &Matrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = format!("{}\n", v.len());
    for &x in v {
        s.push_str(&fmt_f64(x));
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t.txt")
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let a = Matrix::from_rows(&[[0.1, -2.0 / 3.0], [1e-300, 12345.678901234567]]).unwrap();
        let back = parse_matrix(p(), &format_matrix(&a)).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn vector_round_trip_is_exact() {
        let v = vec![std::f64::consts::PI, -0.0, 5e-324, 1.0 / 3.0];
        let back = parse_vector(p(), &format_vector(&v)).unwrap();
        assert_eq!(back.len(), v.len());
        for (a, b) in back.iter().zip(&v) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a matrix\n2 2\n\n1 2\n  # middle\n3 4\n";
        let a = parse_matrix(p(), text).unwrap();
        assert_eq!(a.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_matrix(p(), "2 2\n1 2\n3 x\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_vector(p(), "# c\n2\n1\n2 3\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn count_mismatches_are_rejected() {
        assert!(parse_matrix(p(), "3 1\n1\n2\n").is_err());
        assert!(parse_matrix(p(), "1 1\n1\n2\n").is_err());
        assert!(parse_vector(p(), "2\n1\n").is_err());
        assert!(parse_vector(p(), "").is_err());
        assert!(parse_vector(p(), "1\nnan\n").is_err());
    }
}
