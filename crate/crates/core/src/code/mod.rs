//! Binary LDPC parity-check codes.
//!
//! A [`ParityCheckCode`] stores the Tanner graph of `H` twice: once per check
//! (row adjacency, contiguous and sorted) and once per variable (column
//! adjacency). Edges are numbered in row-major order, which is the order the
//! decoders stream their check-to-variable messages in.
//!
//! Quasi-cyclic codes are described by a [`BaseMatrix`] of cyclic shifts and
//! expanded with [`BaseMatrix::expand`]. [`peg`] builds base-graph masks,
//! [`assign_shifts`] picks shifts that keep the expanded graph free of
//! 4-cycles and short on 6-cycles, and [`girth_of`] checks the result.

mod alist;
pub mod fixtures;
mod girth;
mod peg;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use alist::{load_alist, save_alist, AlistError};
pub use girth::{girth_of, Girth};
pub use peg::{peg_mask, BaseMask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(
        "base matrix must have at least one row and more columns than rows (got {rows}x{cols})"
    )]
    BadDimensions { rows: usize, cols: usize },
    #[error("expansion factor must be positive")]
    ZeroExpansion,
    #[error("base matrix has {got} entries, expected {expected}")]
    EntryCount { expected: usize, got: usize },
    #[error("shift {shift} at block ({row}, {col}) is outside [0, {z})")]
    ShiftOutOfRange {
        row: usize,
        col: usize,
        shift: u32,
        z: usize,
    },
    #[error("edge ({check}, {var}) is outside a {m}x{n} matrix")]
    EdgeOutOfRange {
        check: usize,
        var: usize,
        m: usize,
        n: usize,
    },
    #[error("duplicate edge ({check}, {var})")]
    DuplicateEdge { check: usize, var: usize },
    #[error("degree list has {got} entries, expected {expected}")]
    DegreeCount { expected: usize, got: usize },
    #[error("column {col} asks for degree {degree}, allowed range is 1..={max}")]
    DegreeOutOfRange {
        col: usize,
        degree: usize,
        max: usize,
    },
    #[error("degree sequence needs {needed} edges but a {rows}x{cols} mask holds only {capacity}")]
    InfeasibleDegrees {
        needed: usize,
        rows: usize,
        cols: usize,
        capacity: usize,
    },
    #[error("no 4-cycle-free shift exists for block ({row}, {col}) among {attempts} candidates")]
    ShiftSearchExhausted {
        row: usize,
        col: usize,
        attempts: usize,
    },
    #[error("constructed code has girth {0}, need at least 6")]
    GirthTooSmall(Girth),
    #[error("puncture count {d} exceeds code length {n}")]
    PunctureCount { d: usize, n: usize },
    #[error("mask is {mask_rows}x{mask_cols}, shifts cover {rows}x{cols}")]
    MaskMismatch {
        mask_rows: usize,
        mask_cols: usize,
        rows: usize,
        cols: usize,
    },
}

/// QC-LDPC base matrix. `None` entries are all-zero blocks, `Some(s)` is the
/// `Z x Z` identity cyclically shifted by `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    z: usize,
    shifts: Vec<Option<u32>>,
}

impl BaseMatrix {
    /// Builds a base matrix from row-major shift entries.
    pub fn new(
        rows: usize,
        cols: usize,
        z: usize,
        shifts: Vec<Option<u32>>,
    ) -> Result<Self, CodeError> {
        if rows == 0 || cols <= rows {
            return Err(CodeError::BadDimensions { rows, cols });
        }
        if z == 0 {
            return Err(CodeError::ZeroExpansion);
        }
        if shifts.len() != rows * cols {
            return Err(CodeError::EntryCount {
                expected: rows * cols,
                got: shifts.len(),
            });
        }
        for (k, s) in shifts.iter().enumerate() {
            if let Some(shift) = *s {
                if shift as usize >= z {
                    return Err(CodeError::ShiftOutOfRange {
                        row: k / cols,
                        col: k % cols,
                        shift,
                        z,
                    });
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            z,
            shifts,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn expansion(&self) -> usize {
        self.z
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u32> {
        self.shifts[row * self.cols + col]
    }

    pub fn nonzero_blocks(&self) -> usize {
        self.shifts.iter().filter(|s| s.is_some()).count()
    }

    /// Zero/non-zero pattern of this base matrix.
    pub fn mask(&self) -> BaseMask {
        BaseMask::from_fn(self.rows, self.cols, |r, c| self.get(r, c).is_some())
    }

    /// Replaces every block by its `Z x Z` circulant. Block `(I, J)` with shift
    /// `s` contributes edges `(I*Z + r, J*Z + (r + s) mod Z)`.
    pub fn expand(&self) -> ParityCheckCode {
        let z = self.z;
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); self.rows * z];
        for bi in 0..self.rows {
            for bj in 0..self.cols {
                if let Some(s) = self.get(bi, bj) {
                    let s = s as usize;
                    for r in 0..z {
                        rows[bi * z + r].push((bj * z + (r + s) % z) as u32);
                    }
                }
            }
        }
        // Blocks are visited in ascending column order, so each row is sorted
        // and duplicate-free already.
        ParityCheckCode::from_sorted_rows(self.cols * z, rows)
    }
}

/// Sparse binary parity-check matrix with row and column adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    m: usize,
    n: usize,
    row_start: Vec<usize>,
    row_vars: Vec<u32>,
    col_start: Vec<usize>,
    col_checks: Vec<u32>,
    /// For each entry of `col_checks`, the row-major index of that edge.
    col_edges: Vec<u32>,
}

impl ParityCheckCode {
    /// Builds a code from an arbitrary edge list `(check, variable)`.
    pub fn from_edges<I>(m: usize, n: usize, edges: I) -> Result<Self, CodeError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (check, var) in edges {
            if check >= m || var >= n {
                return Err(CodeError::EdgeOutOfRange { check, var, m, n });
            }
            rows[check].push(var as u32);
        }
        for (check, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(CodeError::DuplicateEdge {
                    check,
                    var: w[0] as usize,
                });
            }
        }
        Ok(Self::from_sorted_rows(n, rows))
    }

    fn from_sorted_rows(n: usize, rows: Vec<Vec<u32>>) -> Self {
        let m = rows.len();
        let mut row_start = Vec::with_capacity(m + 1);
        let mut row_vars = Vec::new();
        row_start.push(0);
        for row in &rows {
            row_vars.extend_from_slice(row);
            row_start.push(row_vars.len());
        }

        let mut col_start = vec![0usize; n + 1];
        for &v in &row_vars {
            col_start[v as usize + 1] += 1;
        }
        for j in 0..n {
            col_start[j + 1] += col_start[j];
        }
        let mut fill = col_start.clone();
        let mut col_checks = vec![0u32; row_vars.len()];
        let mut col_edges = vec![0u32; row_vars.len()];
        for i in 0..m {
            for e in row_start[i]..row_start[i + 1] {
                let j = row_vars[e] as usize;
                col_checks[fill[j]] = i as u32;
                col_edges[fill[j]] = e as u32;
                fill[j] += 1;
            }
        }
        Self {
            m,
            n,
            row_start,
            row_vars,
            col_start,
            col_checks,
            col_edges,
        }
    }

    /// Number of checks (rows of `H`).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of variables (columns of `H`).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        1.0 - self.m as f64 / self.n as f64
    }

    pub fn num_edges(&self) -> usize {
        self.row_vars.len()
    }

    /// Variables connected to check `i`, ascending.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.row_vars[self.row_start[i]..self.row_start[i + 1]]
    }

    /// Row-major edge indices belonging to check `i`.
    pub fn row_edges(&self, i: usize) -> std::ops::Range<usize> {
        self.row_start[i]..self.row_start[i + 1]
    }

    /// Checks connected to variable `j`, ascending.
    pub fn col(&self, j: usize) -> &[u32] {
        &self.col_checks[self.col_start[j]..self.col_start[j + 1]]
    }

    /// Row-major edge indices of the edges at variable `j`, in the same order
    /// as [`col`](Self::col).
    pub fn col_edges(&self, j: usize) -> &[u32] {
        &self.col_edges[self.col_start[j]..self.col_start[j + 1]]
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_start[i + 1] - self.row_start[i]
    }

    pub fn col_weight(&self, j: usize) -> usize {
        self.col_start[j + 1] - self.col_start[j]
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.m).map(|i| self.row_weight(i)).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.n).map(|j| self.col_weight(j)).collect()
    }

    /// All row-major variable indices; `row_vars()[e]` is the variable on edge `e`.
    pub fn edge_vars(&self) -> &[u32] {
        &self.row_vars
    }

    /// Iterates over `(check, variable)` pairs in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j as usize)))
    }

    /// True when the row and column adjacency describe the same edge set.
    pub fn is_transpose_consistent(&self) -> bool {
        if self.col_checks.len() != self.row_vars.len() {
            return false;
        }
        (0..self.n).all(|j| {
            self.col(j).iter().zip(self.col_edges(j)).all(|(&i, &e)| {
                self.row_vars[e as usize] as usize == j
                    && self.row_edges(i as usize).contains(&(e as usize))
            }) && self.col(j).windows(2).all(|w| w[0] < w[1])
        }) && (0..self.m).all(|i| self.row(i).windows(2).all(|w| w[0] < w[1]))
    }
}

impl fmt::Display for ParityCheckCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LDPC code n={} m={} edges={} rate={:.4}",
            self.n,
            self.m,
            self.num_edges(),
            self.rate()
        )
    }
}

/// Fills a base mask with cyclic shifts.
///
/// Blocks are assigned column by column. Every shift in `0..Z` is scored
/// against the blocks already placed: a shift that closes a 4-cycle,
/// `s(a,c) - s(b,c) + s(b,c') - s(a,c') = 0 (mod Z)`, is excluded, and among
/// the rest the one closing the fewest 6-cycles wins. Ties go to the first
/// shift in a seeded random order.
pub fn assign_shifts(mask: &BaseMask, z: usize, seed: u64) -> Result<BaseMatrix, CodeError> {
    let (rows, cols) = (mask.rows(), mask.cols());
    if z == 0 {
        return Err(CodeError::ZeroExpansion);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shifts: Vec<Option<u32>> = vec![None; rows * cols];
    let zi = z as i64;
    let at = |shifts: &[Option<u32>], r: usize, c: usize| shifts[r * cols + c].map(i64::from);
    let mut order: Vec<u32> = (0..z as u32).collect();
    let mut four = vec![false; z];
    let mut six = vec![0u32; z];
    for c in 0..cols {
        for r in 0..rows {
            if !mask.get(r, c) {
                continue;
            }
            four.fill(false);
            six.fill(0);
            // walk r -> c -> r2 -> c2 -> (r3 -> c3 ->) back to r
            for r2 in (0..rows).filter(|&r2| r2 != r) {
                let Some(s_r2c) = at(&shifts, r2, c) else {
                    continue;
                };
                for c2 in (0..cols).filter(|&c2| c2 != c) {
                    let Some(s_r2c2) = at(&shifts, r2, c2) else {
                        continue;
                    };
                    let base = s_r2c - s_r2c2;
                    if let Some(s_rc2) = at(&shifts, r, c2) {
                        four[(base + s_rc2).rem_euclid(zi) as usize] = true;
                    }
                    for r3 in (0..rows).filter(|&r3| r3 != r && r3 != r2) {
                        let Some(s_r3c2) = at(&shifts, r3, c2) else {
                            continue;
                        };
                        for c3 in (0..cols).filter(|&c3| c3 != c && c3 != c2) {
                            if let (Some(s_r3c3), Some(s_rc3)) =
                                (at(&shifts, r3, c3), at(&shifts, r, c3))
                            {
                                let bad = base + s_r3c2 - s_r3c3 + s_rc3;
                                six[bad.rem_euclid(zi) as usize] += 1;
                            }
                        }
                    }
                }
            }
            order.shuffle(&mut rng);
            let best = order
                .iter()
                .filter(|&&s| !four[s as usize])
                .min_by_key(|&&s| six[s as usize])
                .ok_or(CodeError::ShiftSearchExhausted {
                    row: r,
                    col: c,
                    attempts: z,
                })?;
            shifts[r * cols + c] = Some(*best);
        }
    }
    BaseMatrix::new(rows, cols, z, shifts)
}

/// Builds a QC-LDPC code: PEG mask over the base graph, 4-cycle-free shifts,
/// expansion, and a girth check on the result.
pub fn build_qc_code(
    col_degrees: &[usize],
    rows: usize,
    cols: usize,
    z: usize,
    seed: u64,
) -> Result<(BaseMatrix, ParityCheckCode), CodeError> {
    let mask = peg_mask(col_degrees, rows, cols)?;
    let base = assign_shifts(&mask, z, seed)?;
    let code = base.expand();
    let girth = girth_of(&code);
    if girth < Girth::Finite(6) {
        return Err(CodeError::GirthTooSmall(girth));
    }
    Ok((base, code))
}

/// Variable indices ordered for puncturing: lowest column weight first,
/// ties by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctureOrder(Vec<u32>);

impl PunctureOrder {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for PunctureOrder {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

/// First `d` variables in puncturing order.
pub fn puncture_order(code: &ParityCheckCode, d: usize) -> Result<PunctureOrder, CodeError> {
    let n = code.n();
    if d > n {
        return Err(CodeError::PunctureCount { d, n });
    }
    let mut idx: Vec<u32> = (0..n as u32).collect();
    idx.sort_by_key(|&j| (code.col_weight(j as usize), j));
    idx.truncate(d);
    Ok(PunctureOrder(idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_set(code: &ParityCheckCode) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = code.edges().collect();
        e.sort_unstable();
        e
    }

    #[test]
    fn expand_identity_and_zero_block() {
        let base = BaseMatrix::new(1, 2, 3, vec![Some(0), None]).unwrap();
        let code = base.expand();
        assert_eq!((code.m(), code.n()), (3, 6));
        assert_eq!(edge_set(&code), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn expand_single_shift() {
        let base = BaseMatrix::new(1, 2, 3, vec![Some(1), None]).unwrap();
        let code = base.expand();
        assert_eq!(edge_set(&code), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn expand_rate_half() {
        let base = BaseMatrix::new(2, 4, 8, vec![Some(0); 8]).unwrap();
        let code = base.expand();
        assert_eq!((code.m(), code.n()), (16, 32));
        assert_eq!(code.rate(), 0.5);
        assert_eq!(code.num_edges(), 8 * 8);
        assert!(code.is_transpose_consistent());
    }

    #[test]
    fn rejects_bad_shift_with_coordinates() {
        let err = BaseMatrix::new(2, 3, 4, vec![Some(0), None, Some(1), None, Some(4), None])
            .unwrap_err();
        assert_eq!(
            err,
            CodeError::ShiftOutOfRange {
                row: 1,
                col: 1,
                shift: 4,
                z: 4
            }
        );
        assert!(err.to_string().contains("(1, 1)"));
    }

    #[test]
    fn rejects_non_positive_rate() {
        assert!(matches!(
            BaseMatrix::new(2, 2, 4, vec![None; 4]),
            Err(CodeError::BadDimensions { .. })
        ));
        assert!(matches!(
            BaseMatrix::new(0, 2, 4, vec![]),
            Err(CodeError::BadDimensions { .. })
        ));
    }

    #[test]
    fn from_edges_rejects_duplicates() {
        let err = ParityCheckCode::from_edges(2, 3, [(0, 1), (1, 2), (0, 1)]).unwrap_err();
        assert_eq!(err, CodeError::DuplicateEdge { check: 0, var: 1 });
        assert!(ParityCheckCode::from_edges(2, 3, [(2, 0)]).is_err());
    }

    #[test]
    fn column_edges_point_back_to_rows() {
        let code =
            ParityCheckCode::from_edges(3, 5, [(0, 0), (0, 3), (1, 1), (1, 3), (2, 0), (2, 4)])
                .unwrap();
        assert!(code.is_transpose_consistent());
        assert_eq!(code.col(3), &[0, 1]);
        for j in 0..code.n() {
            for &e in code.col_edges(j) {
                assert_eq!(code.edge_vars()[e as usize] as usize, j);
            }
        }
    }

    #[test]
    fn puncture_order_sorts_by_weight_then_index() {
        // column weights [3, 2, 5, 2]
        let code = ParityCheckCode::from_edges(
            5,
            4,
            [
                (0, 0),
                (1, 0),
                (2, 0),
                (0, 1),
                (1, 1),
                (0, 2),
                (1, 2),
                (2, 2),
                (3, 2),
                (4, 2),
                (3, 3),
                (4, 3),
            ],
        )
        .unwrap();
        assert_eq!(code.col_weights(), vec![3, 2, 5, 2]);
        assert_eq!(puncture_order(&code, 2).unwrap().as_slice(), &[1, 3]);
        assert!(puncture_order(&code, 0).unwrap().is_empty());
        let mut all = puncture_order(&code, 4).unwrap().to_vec();
        assert_eq!(all, vec![1, 3, 0, 2]);
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert_eq!(
            puncture_order(&code, 5),
            Err(CodeError::PunctureCount { d: 5, n: 4 })
        );
    }

    #[test]
    fn built_code_is_four_cycle_free() {
        let degrees = [2, 2, 2, 3, 3, 3, 4, 4];
        let (base, code) = build_qc_code(&degrees, 4, 8, 16, 7).unwrap();
        assert_eq!(code.num_edges(), base.nonzero_blocks() * 16);
        assert!(girth_of(&code) >= Girth::Finite(6));
        assert!(code.is_transpose_consistent());
        for (j, &d) in degrees.iter().enumerate() {
            assert_eq!(code.col_weight(j * 16), d);
        }
    }

    #[test]
    fn shift_assignment_is_deterministic() {
        let mask = peg_mask(&[2, 2, 3, 3, 3, 3], 3, 6).unwrap();
        assert_eq!(
            assign_shifts(&mask, 13, 99).unwrap(),
            assign_shifts(&mask, 13, 99).unwrap()
        );
    }
}
