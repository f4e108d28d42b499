//! τ against its floating-point reference on the quantized grid.

use serde::Serialize;

use super::boxplus::box_plus;
use super::rcbp::tau;
use crate::quant::{dequantize, quantize, QuantizerConfig};

/// `quantize(box_plus(dequantize(p), dequantize(q)))`.
pub fn tau_oracle(p: u8, q: u8, cfg: &QuantizerConfig) -> u8 {
    let a = dequantize(p.min(cfg.msg_max as u8) as i8, cfg);
    let b = dequantize(q.min(cfg.msg_max as u8) as i8, cfg);
    quantize(box_plus(a, b), cfg).unsigned_abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TauEntry {
    pub p: u8,
    pub q: u8,
    pub tau: u8,
    pub oracle: u8,
    pub deviation: i16,
}

/// Every `(p, q)` in `[0, msg_max]²`, row-major in `p`.
pub fn tau_table(cfg: &QuantizerConfig) -> Vec<TauEntry> {
    let max = cfg.msg_max as u8;
    (0..=max)
        .flat_map(|p| (0..=max).map(move |q| (p, q)))
        .map(|(p, q)| {
            let t = tau(p, q, max);
            let o = tau_oracle(p, q, cfg);
            TauEntry {
                p,
                q,
                tau: t,
                oracle: o,
                deviation: t as i16 - o as i16,
            }
        })
        .collect()
}
