//! Shipped QC-LDPC fixture codes.
//!
//! Each family has one code length and several mother-code rates, all with
//! 32 base columns. A QBER is served by the member whose rate window (after
//! puncturing and shortening) contains it; see
//! [`crate::protocol::select_code`].

use std::path::{Path, PathBuf};

use super::{build_qc_code, load_alist, BaseMatrix, CodeError, ParityCheckCode};

pub const BASE_COLS: usize = 32;

/// Code lengths with a shipped family.
pub const FAMILY_LENGTHS: [usize; 3] = [1024, 4096, 16384];

/// Base-matrix row counts per family; mother rates 1 - rows/32.
pub const FAMILY_ROWS: [usize; 13] = [4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16];

/// Recipe for one fixture code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSpec {
    pub name: String,
    pub n: usize,
    pub rows: usize,
    pub z: usize,
    pub degrees: Vec<usize>,
    pub seed: u64,
}

impl FixtureSpec {
    pub fn new(n: usize, rows: usize) -> Self {
        Self {
            name: fixture_name(n, rows),
            n,
            rows,
            z: n / BASE_COLS,
            degrees: degree_profile(rows, n / BASE_COLS),
            seed: (n as u64) * 1000 + rows as u64,
        }
    }

    pub fn build(&self) -> Result<(BaseMatrix, ParityCheckCode), CodeError> {
        build_qc_code(&self.degrees, self.rows, BASE_COLS, self.z, self.seed)
    }

    pub fn path(&self) -> PathBuf {
        fixtures_dir().join(format!("{}.alist", self.name))
    }
}

pub fn fixture_name(n: usize, rows: usize) -> String {
    format!("n{n}-mb{rows}")
}

/// Column degrees for a base matrix with `rows` rows and [`BASE_COLS`] columns,
/// as (degree, column count) runs.
///
/// The family members use profiles picked by a density-evolution search on
/// the binary symmetric channel: `rows - 1` degree-2 columns (so they cannot
/// close a cycle among themselves in the base graph), a block of degree 3,
/// and the rest heavy. Heavy columns stop at degree 8: the quantized
/// decoder freezes a soft value once it saturates, and denser columns
/// saturate within a few layers, wrong or not. The cap costs little
/// threshold. Other row counts get the same shape with fixed sizes.
///
/// With a short lifting (`z` below 64) the densest high-rate profiles admit no
/// 4-cycle-free shift assignment, so those members trade some threshold for
/// lighter heavy columns.
fn profile_runs(rows: usize, z: usize) -> Vec<(usize, usize)> {
    match rows {
        4 if z < 64 => vec![(2, 3), (3, 15), (4, 14)],
        5 if z < 64 => vec![(2, 4), (3, 15), (5, 13)],
        6 if z < 64 => vec![(2, 5), (3, 12), (5, 15)],
        8 if z < 64 => vec![(2, 7), (3, 18), (8, 7)],
        4 => vec![(2, 3), (3, 2), (4, 27)],
        5 => vec![(2, 4), (3, 8), (5, 20)],
        6 => vec![(2, 5), (3, 12), (6, 15)],
        7 => vec![(2, 6), (3, 15), (7, 11)],
        8 => vec![(2, 7), (3, 15), (8, 10)],
        9 => vec![(2, 8), (3, 15), (8, 9)],
        10 => vec![(2, 9), (3, 15), (8, 8)],
        11 => vec![(2, 10), (3, 15), (8, 7)],
        12 => vec![(2, 11), (3, 12), (8, 9)],
        13 => vec![(2, 12), (3, 12), (8, 8)],
        14 => vec![(2, 13), (3, 12), (8, 7)],
        15 => vec![(2, 14), (3, 10), (8, 8)],
        16 => vec![(2, 15), (3, 10), (8, 7)],
        _ => {
            let deg2 = rows.saturating_sub(1).min(BASE_COLS / 2);
            let deg3 = 12.min(BASE_COLS - deg2);
            vec![
                (2, deg2),
                (3.min(rows), deg3),
                (rows.min(8), BASE_COLS - deg2 - deg3),
            ]
        }
    }
}

pub fn degree_profile(rows: usize, z: usize) -> Vec<usize> {
    profile_runs(rows, z)
        .into_iter()
        .flat_map(|(deg, count)| std::iter::repeat_n(deg, count))
        .collect()
}

pub fn family_specs(n: usize) -> Vec<FixtureSpec> {
    FAMILY_ROWS
        .iter()
        .map(|&r| FixtureSpec::new(n, r))
        .collect()
}

pub fn all_specs() -> Vec<FixtureSpec> {
    FAMILY_LENGTHS
        .iter()
        .flat_map(|&n| family_specs(n))
        .collect()
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}")]
    Unknown(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: super::AlistError,
    },
}

/// Loads a shipped fixture by name (e.g. `n4096-mb8`).
pub fn load_fixture(name: &str) -> Result<ParityCheckCode, FixtureError> {
    let spec = all_specs()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
    load_code_file(&spec.path())
}

pub fn load_code_file(path: &Path) -> Result<ParityCheckCode, FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_alist(&text).map_err(|source| FixtureError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// All members of the length-`n` family, loaded from disk.
pub fn load_family(n: usize) -> Result<Vec<ParityCheckCode>, FixtureError> {
    if !FAMILY_LENGTHS.contains(&n) {
        return Err(FixtureError::Unknown(format!("n{n}")));
    }
    family_specs(n)
        .iter()
        .map(|s| load_code_file(&s.path()))
        .collect()
}
