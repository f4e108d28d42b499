//! Sweep configuration: a flat JSON object, every key optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::decoder::{DecoderConfig, DecoderPath};
use crate::protocol::ProtocolConfig;
use crate::quant::QuantizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Alice always holds the key; frames spread over the worker pool.
    Uni,
    /// Frames alternate direction between two concurrently decoding parties.
    Bidirectional,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uni" => Ok(Self::Uni),
            "bidirectional" => Ok(Self::Bidirectional),
            _ => Err(format!("unknown mode {s:?} (uni|bidirectional)")),
        }
    }
}

pub fn default_qbers() -> Vec<f64> {
    (1..=8).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Family (`n4096`), fixture (`n4096-mb8`) or alist path.
    pub code: String,
    pub qber: Vec<f64>,
    /// Frames per QBER point.
    pub frames: usize,
    pub target_f: f64,
    pub delta: f64,
    pub msg_max: i8,
    pub e_max: i8,
    pub max_iter: usize,
    pub d_fraction: f64,
    pub reveal_fraction: f64,
    pub max_rounds: u32,
    /// QBER assumed for planning and LLRs; each point's true QBER if unset.
    pub qber_estimate: Option<f64>,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub path: DecoderPath,
    pub mode: Mode,
    /// CSV destination; nothing is written when unset.
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            code: "n4096".into(),
            qber: default_qbers(),
            frames: 100,
            target_f: 1.15,
            delta: QuantizerConfig::DEFAULT_STEP,
            msg_max: QuantizerConfig::DEFAULT_MSG_MAX,
            e_max: QuantizerConfig::DEFAULT_VN_MAX,
            max_iter: crate::decoder::DEFAULT_MAX_ITER,
            d_fraction: crate::protocol::DEFAULT_D_FRACTION,
            reveal_fraction: crate::protocol::DEFAULT_REVEAL_FRACTION,
            max_rounds: crate::protocol::DEFAULT_MAX_ROUNDS,
            qber_estimate: None,
            seed: 1,
            workers: 0,
            path: DecoderPath::Quantized,
            mode: Mode::Uni,
            output: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn quantizer(&self) -> Result<QuantizerConfig, HarnessError> {
        Ok(QuantizerConfig::new(self.delta, self.e_max, self.msg_max)?)
    }

    pub fn protocol(&self) -> Result<ProtocolConfig, HarnessError> {
        Ok(ProtocolConfig {
            d_fraction: self.d_fraction,
            reveal_fraction: self.reveal_fraction,
            max_rounds: self.max_rounds,
            decoder: DecoderConfig {
                path: self.path,
                max_iter: self.max_iter,
                quant: self.quantizer()?,
            },
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        self.quantizer()?;
        if let Some(q) = self.qber.iter().find(|q| !(**q > 0.0 && **q < 0.5)) {
            return bad(format!("qber {q} outside (0, 0.5)"));
        }
        if let Some(q) = self.qber_estimate {
            if !(q > 0.0 && q < 0.5) {
                return bad(format!("qber_estimate {q} outside (0, 0.5)"));
            }
        }
        if !(self.target_f >= 1.0 && self.target_f.is_finite()) {
            return bad(format!("target_f {} must be >= 1", self.target_f));
        }
        if !(self.d_fraction > 0.0 && self.d_fraction < 1.0) {
            return bad(format!("d_fraction {} outside (0, 1)", self.d_fraction));
        }
        if !(self.reveal_fraction > 0.0 && self.reveal_fraction <= 1.0) {
            return bad(format!(
                "reveal_fraction {} outside (0, 1]",
                self.reveal_fraction
            ));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        Ok(())
    }
}
