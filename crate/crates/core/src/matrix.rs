//! Plain-text generator matrices.
//!
//! ```text
//! p m n
//! a_11 a_12 … a_1n
//! …
//! a_m1 a_m2 … a_mn
//! ```
//!
//! Blank lines are ignored. Entries must already be residues in `[0, p)`, so
//! export followed by import reproduces the columns exactly.

use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::gf::{FpVector, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> MatrixError {
    MatrixError::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn export_matrix(code: &LinearCode) -> String {
    let mut out = format!("{} {} {}\n", code.field().p(), code.rows(), code.len());
    for row in code.generator_rows() {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

fn parse_number(line: usize, column: usize, tok: &str) -> Result<u64, MatrixError> {
    tok.parse::<u64>()
        .map_err(|_| parse_err(line, column, format!("expected a non-negative integer, found `{tok}`")))
}

pub fn import_matrix(text: &str) -> Result<LinearCode, MatrixError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing header line `p m n`"))?;
    let htoks = tokens(header);
    if htoks.len() != 3 {
        let col = htoks.get(3).map_or(header.chars().count() + 1, |t| t.0);
        return Err(parse_err(hline, col, "header must be exactly `p m n`"));
    }
    let p = parse_number(hline, htoks[0].0, htoks[0].1)?;
    let m = parse_number(hline, htoks[1].0, htoks[1].1)? as usize;
    let n = parse_number(hline, htoks[2].0, htoks[2].1)? as usize;
    let field = PrimeField::new(p).map_err(|e| parse_err(hline, htoks[0].0, e.to_string()))?;
    if m == 0 {
        return Err(parse_err(hline, htoks[1].0, "m must be at least 1"));
    }
    if n == 0 {
        return Err(parse_err(hline, htoks[2].0, "n must be at least 1"));
    }

    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(m);
    let mut last_line = hline;
    for (ln, line) in lines {
        last_line = ln;
        if rows.len() == m {
            return Err(parse_err(ln, 1, format!("expected {m} rows, found more")));
        }
        let toks = tokens(line);
        if toks.len() != n {
            let col = toks.get(n).map_or(line.chars().count() + 1, |t| t.0);
            return Err(parse_err(
                ln,
                col,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for (col, tok) in toks {
            let v = parse_number(ln, col, tok)?;
            if v >= p {
                return Err(parse_err(ln, col, format!("entry {v} is not a residue mod {p}")));
            }
            row.push(v as u32);
        }
        rows.push(row);
    }
    if rows.len() != m {
        return Err(parse_err(
            last_line + 1,
            1,
            format!("expected {m} rows, found {}", rows.len()),
        ));
    }
    let columns = (0..n)
        .map(|j| FpVector((0..m).map(|i| rows[i][j]).collect()))
        .collect();
    Ok(LinearCode::from_columns(&field, m, columns)?)
}

/// Whether two codes have the same columns up to a permutation.
pub fn equal_up_to_permutation(a: &LinearCode, b: &LinearCode) -> bool {
    if a.field().p() != b.field().p() || a.rows() != b.rows() || a.len() != b.len() {
        return false;
    }
    let mut x: Vec<&[u32]> = a.columns().iter().map(|c| c.coords()).collect();
    let mut y: Vec<&[u32]> = b.columns().iter().map(|c| c.coords()).collect();
    x.sort_unstable();
    y.sort_unstable();
    x == y
}
