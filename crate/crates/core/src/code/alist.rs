//! MacKay alist text format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col degrees (n values)
//! row degrees (m values)
//! n lines of 1-based check indices, zero padded
//! m lines of 1-based variable indices, zero padded
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::ParityCheckCode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlistError {
    #[error("line {line}: unexpected end of input, expected {expected}")]
    Truncated { line: usize, expected: &'static str },
    #[error("line {line}: cannot parse {token:?} as an integer")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as integers, with its 1-based line number.
    fn next_numbers(&mut self, expected: &'static str) -> Result<(usize, Vec<usize>), AlistError> {
        for (k, raw) in self.inner.by_ref() {
            let line = k + 1;
            self.last = line;
            if raw.trim().is_empty() {
                continue;
            }
            let nums = raw
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError::BadNumber {
                        line,
                        token: tok.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((line, nums));
        }
        Err(AlistError::Truncated {
            line: self.last + 1,
            expected,
        })
    }
}

fn invalid(line: usize, msg: impl Into<String>) -> AlistError {
    AlistError::Invalid {
        line,
        msg: msg.into(),
    }
}

fn take_exact(
    lines: &mut Lines<'_>,
    count: usize,
    expected: &'static str,
) -> Result<(usize, Vec<usize>), AlistError> {
    // degree lists may be wrapped over several lines
    let mut out = Vec::with_capacity(count);
    let mut first_line = 0;
    while out.len() < count {
        let (line, nums) = lines.next_numbers(expected)?;
        if first_line == 0 {
            first_line = line;
        }
        out.extend(nums);
        if out.len() > count {
            return Err(invalid(
                line,
                format!("expected {count} values for {expected}"),
            ));
        }
    }
    Ok((first_line, out))
}

/// Adjacency list line: 1-based indices followed by optional zero padding.
fn adjacency(
    line: usize,
    nums: &[usize],
    degree: usize,
    bound: usize,
) -> Result<Vec<usize>, AlistError> {
    if nums.len() < degree {
        return Err(invalid(
            line,
            format!("expected {degree} entries, found {}", nums.len()),
        ));
    }
    let (entries, padding) = nums.split_at(degree);
    if padding.iter().any(|&p| p != 0) {
        return Err(invalid(line, "non-zero entry beyond the declared degree"));
    }
    entries
        .iter()
        .map(|&x| {
            if x == 0 || x > bound {
                Err(invalid(line, format!("index {x} outside 1..={bound}")))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

pub fn load_alist(text: &str) -> Result<ParityCheckCode, AlistError> {
    let mut lines = Lines::new(text);
    let (line, dims) = lines.next_numbers("\"n m\" header")?;
    let [n, m] = dims[..] else {
        return Err(invalid(line, "header must be \"n m\""));
    };
    if n == 0 || m == 0 {
        return Err(invalid(line, "empty matrix"));
    }
    let (line, maxes) = lines.next_numbers("maximum degrees")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(invalid(line, "expected two maximum degrees"));
    };
    let (col_line, col_deg) = take_exact(&mut lines, n, "column degrees")?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(invalid(
            col_line,
            format!("column degree {d} exceeds maximum {max_col}"),
        ));
    }
    let (row_line, row_deg) = take_exact(&mut lines, m, "row degrees")?;
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(invalid(
            row_line,
            format!("row degree {d} exceeds maximum {max_row}"),
        ));
    }

    let mut edges = Vec::with_capacity(col_deg.iter().sum());
    for (j, &deg) in col_deg.iter().enumerate() {
        let (line, nums) = lines.next_numbers("column adjacency")?;
        let mut checks = adjacency(line, &nums, deg, m)?;
        checks.sort_unstable();
        if checks.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(
                line,
                format!("column {} lists a check twice", j + 1),
            ));
        }
        edges.extend(checks.into_iter().map(|i| (i, j)));
    }
    let code =
        ParityCheckCode::from_edges(m, n, edges).map_err(|e| invalid(lines.last, e.to_string()))?;

    for (i, &deg) in row_deg.iter().enumerate() {
        let (line, nums) = lines.next_numbers("row adjacency")?;
        let mut vars = adjacency(line, &nums, deg, n)?;
        vars.sort_unstable();
        let listed: Vec<usize> = code.row(i).iter().map(|&v| v as usize).collect();
        if vars != listed {
            return Err(invalid(
                line,
                format!("row {} disagrees with the column lists", i + 1),
            ));
        }
    }
    Ok(code)
}

pub fn save_alist(code: &ParityCheckCode) -> String {
    let col_w = code.col_weights();
    let row_w = code.row_weights();
    let max_col = col_w.iter().copied().max().unwrap_or(0);
    let max_row = row_w.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let join =
        |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "{} {}", code.n(), code.m());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_w.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut row_w.iter().copied()));
    for j in 0..code.n() {
        let mut it = code
            .col(j)
            .iter()
            .map(|&i| i as usize + 1)
            .chain(std::iter::repeat_n(0, max_col - col_w[j]));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for i in 0..code.m() {
        let mut it = code
            .row(i)
            .iter()
            .map(|&j| j as usize + 1)
            .chain(std::iter::repeat_n(0, max_row - row_w[i]));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}
