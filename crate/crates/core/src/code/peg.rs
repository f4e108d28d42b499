//! Progressive edge growth over the base graph.

use std::collections::VecDeque;

use super::CodeError;

/// Zero/non-zero pattern of a base matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BaseMask {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut mask = Self::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                mask.bits[r * cols + c] = f(r, c);
            }
        }
        mask
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.cols + col] = true;
    }

    pub fn col_degree(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col)).count()
    }

    pub fn row_degree(&self, row: usize) -> usize {
        (0..self.cols).filter(|&c| self.get(row, c)).count()
    }
}

/// PEG placement of base-graph edges for the given column degrees.
///
/// Columns are processed in ascending degree (ties by index). The first edge
/// of a column goes to the lightest check; each later edge goes to a check
/// unreachable from the column if any exists, else to one at maximum BFS
/// depth. Remaining ties prefer lower check degree, then lower index.
pub fn peg_mask(col_degrees: &[usize], rows: usize, cols: usize) -> Result<BaseMask, CodeError> {
    if col_degrees.len() != cols {
        return Err(CodeError::DegreeCount {
            expected: cols,
            got: col_degrees.len(),
        });
    }
    let needed: usize = col_degrees.iter().sum();
    if needed > rows * cols {
        return Err(CodeError::InfeasibleDegrees {
            needed,
            rows,
            cols,
            capacity: rows * cols,
        });
    }
    if let Some((col, &degree)) = col_degrees
        .iter()
        .enumerate()
        .find(|(_, &d)| d == 0 || d > rows)
    {
        return Err(CodeError::DegreeOutOfRange {
            col,
            degree,
            max: rows,
        });
    }

    let mut mask = BaseMask::new(rows, cols);
    let mut check_deg = vec![0usize; rows];
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by_key(|&c| (col_degrees[c], c));

    for col in order {
        for k in 0..col_degrees[col] {
            let depth = if k == 0 {
                vec![None; rows]
            } else {
                check_depths(&mask, col)
            };
            let pick = (0..rows)
                .filter(|&r| !mask.get(r, col))
                .min_by_key(|&r| {
                    // unreachable sorts first, then deeper first
                    let reach = match depth[r] {
                        None => 0,
                        Some(d) => usize::MAX - d,
                    };
                    (reach, check_deg[r], r)
                })
                .expect("degree <= rows leaves a free check");
            mask.set(pick, col);
            check_deg[pick] += 1;
        }
    }
    Ok(mask)
}

/// BFS depth (in check layers) of every check reachable from `col`.
fn check_depths(mask: &BaseMask, col: usize) -> Vec<Option<usize>> {
    let (rows, cols) = (mask.rows(), mask.cols());
    let mut check_depth = vec![None; rows];
    let mut col_seen = vec![false; cols];
    col_seen[col] = true;
    let mut queue = VecDeque::new();
    for r in 0..rows {
        if mask.get(r, col) {
            check_depth[r] = Some(0);
            queue.push_back(r);
        }
    }
    while let Some(r) = queue.pop_front() {
        let d = check_depth[r].unwrap();
        for c in 0..cols {
            if !mask.get(r, c) || col_seen[c] {
                continue;
            }
            col_seen[c] = true;
            for r2 in 0..rows {
                if mask.get(r2, c) && check_depth[r2].is_none() {
                    check_depth[r2] = Some(d + 1);
                    queue.push_back(r2);
                }
            }
        }
    }
    check_depth
}
