//! Per-point metrics and their CSV form.
//!
//! Every float is held at 6 significant digits in fixed decimal notation,
//! so parsing the CSV gives back the in-memory values exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::protocol::FrameOutcome;

pub const CSV_HEADER: [&str; 8] = [
    "qber",
    "frames",
    "fer",
    "avg_efficiency",
    "avg_iterations",
    "avg_rounds",
    "throughput_mbps",
    "wall_seconds",
];

const SIG_DIGITS: i32 = 6;

/// Fixed-decimal text with 6 significant digits.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

/// `v` as it reads back from [`format_sig`].
pub fn round_sig(v: f64) -> f64 {
    format_sig(v).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub qber: f64,
    pub frames: usize,
    /// Frames not verified, over all frames.
    pub fer: f64,
    /// Mean f over verified frames; NaN when none verified.
    pub avg_efficiency: f64,
    /// Mean decoder iterations per frame, summed over reveal rounds.
    pub avg_iterations: f64,
    pub avg_rounds: f64,
    /// Verified payload bits per wall-clock second, in 10⁶.
    pub throughput_mbps: f64,
    pub wall_seconds: f64,
}

impl MetricsRow {
    pub fn from_outcomes(qber: f64, outcomes: &[FrameOutcome], wall_seconds: f64) -> Self {
        let frames = outcomes.len();
        let n = frames.max(1) as f64;
        let verified: Vec<&FrameOutcome> = outcomes.iter().filter(|o| o.verified).collect();
        let effs: Vec<f64> = verified.iter().filter_map(|o| o.efficiency).collect();
        let avg_efficiency = if effs.is_empty() {
            f64::NAN
        } else {
            effs.iter().sum::<f64>() / effs.len() as f64
        };
        let good_bits: usize = verified.iter().map(|o| o.payload_bits).sum();
        let throughput = if wall_seconds > 0.0 {
            good_bits as f64 / wall_seconds / 1e6
        } else {
            0.0
        };
        Self {
            qber: round_sig(qber),
            frames,
            fer: round_sig((frames - verified.len()) as f64 / n),
            avg_efficiency: round_sig(avg_efficiency),
            avg_iterations: round_sig(
                outcomes.iter().map(|o| o.iterations as f64).sum::<f64>() / n,
            ),
            avg_rounds: round_sig(outcomes.iter().map(|o| o.rounds as f64).sum::<f64>() / n),
            throughput_mbps: round_sig(throughput),
            wall_seconds: round_sig(wall_seconds),
        }
    }

    fn record(&self) -> [String; 8] {
        [
            format_sig(self.qber),
            self.frames.to_string(),
            format_sig(self.fer),
            format_sig(self.avg_efficiency),
            format_sig(self.avg_iterations),
            format_sig(self.avg_rounds),
            format_sig(self.throughput_mbps),
            format_sig(self.wall_seconds),
        ]
    }

    /// Field-wise equality that treats NaN as equal to NaN.
    pub fn same_as(&self, other: &Self) -> bool {
        let eq = |a: f64, b: f64| a == b || (a.is_nan() && b.is_nan());
        self.frames == other.frames
            && eq(self.qber, other.qber)
            && eq(self.fer, other.fer)
            && eq(self.avg_efficiency, other.avg_efficiency)
            && eq(self.avg_iterations, other.avg_iterations)
            && eq(self.avg_rounds, other.avg_rounds)
            && eq(self.throughput_mbps, other.throughput_mbps)
            && eq(self.wall_seconds, other.wall_seconds)
    }
}

pub fn write_metrics<W: std::io::Write>(rows: &[MetricsRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_metrics_file(rows: &[MetricsRow], path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_metrics(rows, file)
}

pub fn read_metrics<R: std::io::Read>(input: R) -> Result<Vec<MetricsRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formatting() {
        assert_eq!(format_sig(0.01), "0.0100000");
        assert_eq!(format_sig(1.23456789), "1.23457");
        assert_eq!(format_sig(123456.7), "123457");
        assert_eq!(format_sig(1234567.0), "1234567");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::NAN), "NaN");
        assert_eq!(round_sig(2.0 / 3.0), 0.666667);
    }

    #[test]
    fn empty_point_divides_by_nothing() {
        let row = MetricsRow::from_outcomes(0.02, &[], 0.0);
        assert_eq!(row.frames, 0);
        assert_eq!(row.fer, 0.0);
        assert!(row.avg_efficiency.is_nan());
        assert_eq!(row.throughput_mbps, 0.0);
    }

    fn row(v: [f64; 7], frames: usize) -> MetricsRow {
        MetricsRow {
            qber: round_sig(v[0]),
            frames,
            fer: round_sig(v[1]),
            avg_efficiency: round_sig(v[2]),
            avg_iterations: round_sig(v[3]),
            avg_rounds: round_sig(v[4]),
            throughput_mbps: round_sig(v[5]),
            wall_seconds: round_sig(v[6]),
        }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_metrics(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "qber,frames,fer,avg_efficiency,avg_iterations,avg_rounds,throughput_mbps,wall_seconds\n"
        );
    }

    proptest! {
        #[test]
        fn csv_round_trip(vals in proptest::array::uniform7(1e-7f64..1e7), frames in 0usize..100_000, nan in any::<bool>()) {
            let mut r = row(vals, frames);
            if nan {
                r.avg_efficiency = f64::NAN;
            }
            let rows = vec![r, row([0.0; 7], 0)];
            let mut buf = Vec::new();
            write_metrics(&rows, &mut buf).unwrap();
            let back = read_metrics(&buf[..]).unwrap();
            prop_assert_eq!(back.len(), 2);
            for (a, b) in rows.iter().zip(&back) {
                prop_assert!(a.same_as(b), "{:?} vs {:?}", a, b);
            }
        }
    }
}
