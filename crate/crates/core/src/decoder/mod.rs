//! Syndrome-target LDPC decoding.
//!
//! Two representations share one layered schedule: a floating-point
//! reference path with the exact box-plus and a quantized path with 8-bit
//! soft values, τ check-node arithmetic and saturation-oriented variable
//! updates. A flooding schedule exists for the float path only, as a
//! baseline for convergence speed.
//!
//! The target syndrome enters through the check-node sign: a check whose
//! target bit is 1 flips the sign of all its outgoing messages. Decoding
//! toward the all-zero syndrome is ordinary codeword decoding.

mod boxplus;
mod kernels;
mod rcbp;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::ParityCheckCode;
use crate::quant::{quantize, QuantizerConfig};

pub use boxplus::{
    box_plus, box_plus_mag, box_plus_reduce, check_magnitude_boxplus, check_magnitude_phi,
    check_magnitude_tanh, phi, PhiDomain,
};
pub use kernels::{
    check_node_update_float, check_node_update_quantized, clamp_llr, float_check_outputs,
    saturating_add_llr, vn_update_saturating, Scratch, FLOAT_MSG_LIMIT,
};
pub use rcbp::{tau, tau_leave_one_out};
pub use table::{tau_oracle, tau_table, TauEntry};

/// Soft value used for positions whose bit both sides know.
pub const KNOWN_BIT_LLR: f64 = 1000.0;

pub const DEFAULT_MAX_ITER: usize = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("expected {expected} LLRs, got {got}")]
    LlrLength { expected: usize, got: usize },
    #[error("expected {expected} syndrome bits, got {got}")]
    SyndromeLength { expected: usize, got: usize },
    #[error("expected a {expected}-bit word, got {got}")]
    WordLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderPath {
    Float,
    Quantized,
}

impl std::str::FromStr for DecoderPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "float" => Ok(Self::Float),
            "quantized" => Ok(Self::Quantized),
            _ => Err(format!("unknown decoder path {s:?} (float|quantized)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub path: DecoderPath,
    pub max_iter: usize,
    pub quant: QuantizerConfig,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            path: DecoderPath::Quantized,
            max_iter: DEFAULT_MAX_ITER,
            quant: QuantizerConfig::default(),
        }
    }
}

impl DecoderConfig {
    pub fn with_path(path: DecoderPath) -> Self {
        Self {
            path,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Hard decisions, one bit (0/1) per byte.
    pub word: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
    pub syndrome_matched: bool,
}

/// `H · word` over GF(2).
pub fn syndrome_of(code: &ParityCheckCode, word: &[u8]) -> Result<Vec<u8>, DecodeError> {
    if word.len() != code.n() {
        return Err(DecodeError::WordLength {
            expected: code.n(),
            got: word.len(),
        });
    }
    Ok((0..code.m())
        .map(|i| {
            code.row(i)
                .iter()
                .fold(0u8, |acc, &j| acc ^ (word[j as usize] & 1))
        })
        .collect())
}

/// Soft state of one decode: one value per variable and one stored
/// check-to-variable message per edge. Variable-to-check messages are never
/// stored.
#[derive(Debug, Clone)]
enum State {
    Float { soft: Vec<f32>, msgs: Vec<f32> },
    Quantized { soft: Vec<i8>, msgs: Vec<i8> },
}

/// Decoder bound to one code; buffers are reused across frames.
#[derive(Debug, Clone)]
pub struct Decoder<'c> {
    code: &'c ParityCheckCode,
    cfg: DecoderConfig,
    state: State,
    scratch: Scratch,
    hard: Vec<u8>,
}

impl<'c> Decoder<'c> {
    pub fn new(code: &'c ParityCheckCode, cfg: DecoderConfig) -> Self {
        let (n, e) = (code.n(), code.num_edges());
        let state = match cfg.path {
            DecoderPath::Float => State::Float {
                soft: vec![0.0; n],
                msgs: vec![0.0; e],
            },
            DecoderPath::Quantized => State::Quantized {
                soft: vec![0; n],
                msgs: vec![0; e],
            },
        };
        let max_deg = (0..code.m()).map(|i| code.row_weight(i)).max().unwrap_or(0);
        Self {
            code,
            cfg,
            state,
            scratch: Scratch::with_degree(max_deg),
            hard: vec![0; n],
        }
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    /// Bytes held by the soft values and edge messages.
    pub fn state_bytes(&self) -> usize {
        match &self.state {
            State::Float { soft, msgs } => {
                std::mem::size_of_val(&soft[..]) + std::mem::size_of_val(&msgs[..])
            }
            State::Quantized { soft, msgs } => {
                std::mem::size_of_val(&soft[..]) + std::mem::size_of_val(&msgs[..])
            }
        }
    }

    fn check_dims(&self, llrs: &[f64], syndrome: &[u8]) -> Result<(), DecodeError> {
        if llrs.len() != self.code.n() {
            return Err(DecodeError::LlrLength {
                expected: self.code.n(),
                got: llrs.len(),
            });
        }
        if syndrome.len() != self.code.m() {
            return Err(DecodeError::SyndromeLength {
                expected: self.code.m(),
                got: syndrome.len(),
            });
        }
        Ok(())
    }

    /// Layered decoding in natural row order. The syndrome is tested after
    /// every full iteration.
    pub fn decode(&mut self, llrs: &[f64], syndrome: &[u8]) -> Result<DecodeResult, DecodeError> {
        self.check_dims(llrs, syndrome)?;
        let code = self.code;
        let max_iter = self.cfg.max_iter;
        let quant = self.cfg.quant;
        let mut iterations = 0;
        let mut matched = false;
        match &mut self.state {
            State::Float { soft, msgs } => {
                for (s, &l) in soft.iter_mut().zip(llrs) {
                    *s = l.clamp(-KNOWN_BIT_LLR, KNOWN_BIT_LLR) as f32;
                }
                msgs.fill(0.0);
                for it in 1..=max_iter {
                    for i in 0..code.m() {
                        let edges = code.row_edges(i);
                        check_node_update_float(
                            soft,
                            &mut msgs[edges],
                            code.row(i),
                            syndrome[i] & 1 == 1,
                            &mut self.scratch,
                        );
                    }
                    iterations = it;
                    hard_decide(soft.iter().map(|&s| s < 0.0), &mut self.hard);
                    if syndrome_matches(code, &self.hard, syndrome) {
                        matched = true;
                        break;
                    }
                }
            }
            State::Quantized { soft, msgs } => {
                for (s, &l) in soft.iter_mut().zip(llrs) {
                    *s = quantize(l, &quant);
                }
                msgs.fill(0);
                for it in 1..=max_iter {
                    for i in 0..code.m() {
                        let edges = code.row_edges(i);
                        check_node_update_quantized(
                            soft,
                            &mut msgs[edges],
                            code.row(i),
                            syndrome[i] & 1 == 1,
                            quant.vn_max,
                            quant.msg_max,
                            &mut self.scratch,
                        );
                    }
                    iterations = it;
                    hard_decide(soft.iter().map(|&s| s < 0), &mut self.hard);
                    if syndrome_matches(code, &self.hard, syndrome) {
                        matched = true;
                        break;
                    }
                }
            }
        }
        if max_iter == 0 {
            let signs: Vec<bool> = llrs.iter().map(|&l| l < 0.0).collect();
            hard_decide(signs.into_iter(), &mut self.hard);
            matched = syndrome_matches(code, &self.hard, syndrome);
        }
        Ok(DecodeResult {
            word: self.hard.clone(),
            converged: matched,
            iterations,
            syndrome_matched: matched,
        })
    }

    /// Flooding schedule, float path: every check reads the soft values of the
    /// previous iteration, then all soft values are recomputed from the
    /// channel LLRs plus all incoming messages.
    pub fn decode_flooding(
        &mut self,
        llrs: &[f64],
        syndrome: &[u8],
    ) -> Result<DecodeResult, DecodeError> {
        self.check_dims(llrs, syndrome)?;
        let code = self.code;
        let max_iter = self.cfg.max_iter;
        let channel: Vec<f64> = llrs
            .iter()
            .map(|l| l.clamp(-KNOWN_BIT_LLR, KNOWN_BIT_LLR))
            .collect();
        let mut soft: Vec<f64> = channel.clone();
        let mut msgs = vec![0.0f64; code.num_edges()];
        let mut inputs = Vec::new();
        let mut out = Vec::new();
        let mut fwd = Vec::new();
        let mut iterations = 0;
        let mut matched = false;
        for it in 1..=max_iter {
            for i in 0..code.m() {
                let edges = code.row_edges(i);
                let vars = code.row(i);
                inputs.clear();
                inputs.extend(
                    vars.iter()
                        .zip(&msgs[edges.clone()])
                        .map(|(&v, &l)| soft[v as usize] - l),
                );
                out.clear();
                out.resize(vars.len(), 0.0);
                float_check_outputs(&inputs, syndrome[i] & 1 == 1, &mut fwd, &mut out);
                msgs[edges].copy_from_slice(&out);
            }
            for (j, s) in soft.iter_mut().enumerate() {
                *s = channel[j]
                    + code
                        .col_edges(j)
                        .iter()
                        .map(|&e| msgs[e as usize])
                        .sum::<f64>();
            }
            iterations = it;
            hard_decide(soft.iter().map(|&s| s < 0.0), &mut self.hard);
            if syndrome_matches(code, &self.hard, syndrome) {
                matched = true;
                break;
            }
        }
        Ok(DecodeResult {
            word: self.hard.clone(),
            converged: matched,
            iterations,
            syndrome_matched: matched,
        })
    }
}

fn hard_decide(negative: impl Iterator<Item = bool>, hard: &mut [u8]) {
    for (h, neg) in hard.iter_mut().zip(negative) {
        *h = neg as u8;
    }
}

fn syndrome_matches(code: &ParityCheckCode, word: &[u8], target: &[u8]) -> bool {
    (0..code.m()).all(|i| {
        let parity = code
            .row(i)
            .iter()
            .fold(0u8, |acc, &j| acc ^ word[j as usize]);
        parity == target[i] & 1
    })
}

/// One-shot layered decode.
pub fn decode(
    code: &ParityCheckCode,
    llrs: &[f64],
    syndrome: &[u8],
    cfg: DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    Decoder::new(code, cfg).decode(llrs, syndrome)
}

/// One-shot flooding decode (float path).
pub fn decode_flooding(
    code: &ParityCheckCode,
    llrs: &[f64],
    syndrome: &[u8],
    max_iter: usize,
) -> Result<DecodeResult, DecodeError> {
    let cfg = DecoderConfig {
        path: DecoderPath::Float,
        max_iter,
        quant: QuantizerConfig::default(),
    };
    Decoder::new(code, cfg).decode_flooding(llrs, syndrome)
}
