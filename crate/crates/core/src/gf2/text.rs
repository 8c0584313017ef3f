//! Line-oriented text format for sparse binary matrices.
//!
//! Line 1 is `"m n"`; each of the next `m` lines holds the space-separated
//! ascending column indices of the ones in that row, with an empty line for
//! a zero row. Emission is canonical (single spaces, LF, trailing newline),
//! so emit -> parse -> emit is byte-stable.

use crate::error::{Error, Result};

use super::matrix::SparseBinaryMatrix;

pub fn matrix_to_text(matrix: &SparseBinaryMatrix) -> String {
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        let mut first = true;
        for &c in matrix.row_support(i) {
            if !first {
                out.push(' ');
            }
            out.push_str(&c.to_string());
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
    let mut parts = header.split_whitespace();
    let rows: usize = parse_count(parts.next(), "row count")?;
    let cols: usize = parse_count(parts.next(), "column count")?;
    if parts.next().is_some() {
        return Err(Error::Parse(format!(
            "header must be exactly \"m n\", got {header:?}"
        )));
    }

    let mut supports = Vec::with_capacity(rows);
    for i in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing row line {i}")))?;
        let support: Vec<usize> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| Error::Parse(format!("row {i}: bad column index {tok:?}")))
            })
            .collect::<Result<_>>()?;
        supports.push(support);
    }
    for rest in lines {
        if !rest.trim().is_empty() {
            return Err(Error::Parse(format!(
                "unexpected trailing content: {rest:?}"
            )));
        }
    }
    SparseBinaryMatrix::new(cols, supports)
}

fn parse_count(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what} in header")))?;
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_stable() {
        let m = SparseBinaryMatrix::new(5, vec![vec![0, 2, 4], vec![], vec![1]]).unwrap();
        let text = matrix_to_text(&m);
        assert_eq!(text, "3 5\n0 2 4\n\n1\n");
        let back = matrix_from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(matrix_to_text(&back), text);
    }

    #[test]
    fn empty_matrix() {
        let m = SparseBinaryMatrix::zeros(0, 7);
        let text = matrix_to_text(&m);
        assert_eq!(text, "0 7\n");
        assert_eq!(matrix_from_text(&text).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matrix_from_text("").is_err());
        assert!(matrix_from_text("2\n0\n1\n").is_err());
        assert!(matrix_from_text("1 3\n0 5\n").is_err());
        assert!(matrix_from_text("2 3\n0\n").is_err());
        assert!(matrix_from_text("1 3\n0 x\n").is_err());
        assert!(matrix_from_text("1 3\n0\n1\n").is_err());
        // unsorted support rejected by the matrix invariant
        assert!(matrix_from_text("1 3\n2 1\n").is_err());
    }
}
