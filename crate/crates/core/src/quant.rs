//! Channel LLRs and the 8-bit fixed-point LLR representation.
//!
//! An integer `k != 0` stands for the magnitude `|k|*step + step/2`
//! (midpoint convention), so quantization truncates toward zero and
//! dequantization adds half a step back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum QuantError {
    #[error("qber {0} outside (0, 0.5)")]
    QberDomain(f64),
    #[error("quantizer step must be positive and finite, got {0}")]
    Step(f64),
    #[error("need 0 < msg_max <= vn_max <= 127, got msg_max={msg_max} vn_max={vn_max}")]
    Limits { msg_max: i8, vn_max: i8 },
}

/// Fixed-point format shared by the quantized decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    /// LLR units per integer step.
    pub step: f64,
    /// Soft-value magnitude cap (`E_max`).
    pub vn_max: i8,
    /// Check-message magnitude cap (`MSG_max`).
    pub msg_max: i8,
}

impl QuantizerConfig {
    /// Picked by measurement: τ tracks the exact box-plus within one step
    /// for steps in about [0.21, 0.7], and inside that window decoding is
    /// closest to the float path near 0.3, with a sharp loss past 0.4.
    pub const DEFAULT_STEP: f64 = 0.3;
    pub const DEFAULT_VN_MAX: i8 = 127;
    pub const DEFAULT_MSG_MAX: i8 = 63;

    pub fn new(step: f64, vn_max: i8, msg_max: i8) -> Result<Self, QuantError> {
        let cfg = Self {
            step,
            vn_max,
            msg_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_step(step: f64) -> Result<Self, QuantError> {
        Self::new(step, Self::DEFAULT_VN_MAX, Self::DEFAULT_MSG_MAX)
    }

    pub fn validate(&self) -> Result<(), QuantError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(QuantError::Step(self.step));
        }
        if !(0 < self.msg_max && self.msg_max <= self.vn_max) {
            return Err(QuantError::Limits {
                msg_max: self.msg_max,
                vn_max: self.vn_max,
            });
        }
        Ok(())
    }
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        Self {
            step: Self::DEFAULT_STEP,
            vn_max: Self::DEFAULT_VN_MAX,
            msg_max: Self::DEFAULT_MSG_MAX,
        }
    }
}

/// `ln((1 - qber) / qber)`, the LLR magnitude of one BSC observation.
pub fn channel_llr_magnitude(qber: f64) -> Result<f64, QuantError> {
    if !(qber > 0.0 && qber < 0.5) {
        return Err(QuantError::QberDomain(qber));
    }
    Ok(((1.0 - qber) / qber).ln())
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Sign-preserving truncation to `[-vn_max, vn_max]`. NaN maps to 0.
pub fn quantize(llr: f64, cfg: &QuantizerConfig) -> i8 {
    let mag = (llr.abs() / cfg.step).floor();
    let mag = if mag.is_nan() {
        0
    } else {
        mag.min(cfg.vn_max as f64) as i8
    };
    if llr < 0.0 {
        -mag
    } else {
        mag
    }
}

pub fn dequantize(q: i8, cfg: &QuantizerConfig) -> f64 {
    if q == 0 {
        return 0.0;
    }
    let mag = q.unsigned_abs() as f64 * cfg.step + cfg.step / 2.0;
    if q < 0 {
        -mag
    } else {
        mag
    }
}

/// Per-variable floating-point LLRs. Infinite inputs are saturated to
/// `±limit` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>, limit: f64) -> Self {
        Self(
            values
                .into_iter()
                .map(|v| {
                    if v.is_nan() {
                        0.0
                    } else {
                        v.clamp(-limit, limit)
                    }
                })
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn quantize(&self, cfg: &QuantizerConfig) -> QLlrVector {
        QLlrVector(self.0.iter().map(|&v| quantize(v, cfg)).collect())
    }
}

/// Per-variable 8-bit LLRs in `[-127, 127]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLlrVector(Vec<i8>);

impl QLlrVector {
    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn dequantize(&self, cfg: &QuantizerConfig) -> Vec<f64> {
        self.0.iter().map(|&q| dequantize(q, cfg)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(step: f64) -> QuantizerConfig {
        QuantizerConfig::with_step(step).unwrap()
    }

    #[test]
    fn channel_llr_values() {
        // ln(0.98/0.02) and ln 9
        assert!((channel_llr_magnitude(0.02).unwrap() - 3.891820).abs() < 1e-5);
        assert!((channel_llr_magnitude(0.1).unwrap() - 9f64.ln()).abs() < 1e-12);
        assert!(channel_llr_magnitude(0.499_999_9).unwrap() < 1e-5);
        assert_eq!(channel_llr_magnitude(0.5), Err(QuantError::QberDomain(0.5)));
        assert!(channel_llr_magnitude(0.0).is_err());
        assert!(channel_llr_magnitude(-0.1).is_err());
        assert!(channel_llr_magnitude(f64::NAN).is_err());
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(0.0, &cfg(0.25)), 0);
        assert_eq!(quantize(1e6, &cfg(0.25)), 127);
        assert_eq!(quantize(-1e6, &cfg(0.25)), -127);
        assert_eq!(quantize(f64::INFINITY, &cfg(0.25)), 127);
        assert_eq!(quantize(3.89182, &cfg(0.0625)), 62);
        assert_eq!(quantize(-3.89182, &cfg(0.0625)), -62);
    }

    #[test]
    fn dequantize_examples() {
        assert_eq!(dequantize(0, &cfg(0.0625)), 0.0);
        assert_eq!(dequantize(62, &cfg(0.0625)), 3.90625);
        assert_eq!(dequantize(-62, &cfg(0.0625)), -3.90625);
    }

    #[test]
    fn config_validation() {
        assert!(QuantizerConfig::new(0.0, 127, 63).is_err());
        assert!(QuantizerConfig::new(0.25, 63, 64).is_err());
        assert!(QuantizerConfig::new(0.25, 127, 0).is_err());
        assert!(QuantizerConfig::new(0.25, 127, 127).is_ok());
        assert!(QuantizerConfig::default().validate().is_ok());
    }

    #[test]
    fn vectors_saturate() {
        let v = LlrVector::new(vec![f64::INFINITY, -3.0, f64::NEG_INFINITY], 1000.0);
        assert_eq!(v.as_slice(), &[1000.0, -3.0, -1000.0]);
        let q = v.quantize(&cfg(0.25));
        assert_eq!(q.as_slice(), &[127, -12, -127]);
        assert_eq!(q.dequantize(&cfg(0.25))[1], -3.125);
    }

    proptest! {
        #[test]
        fn quantize_is_odd_and_bounded(x in -1e9f64..1e9, step in 0.01f64..2.0) {
            let c = cfg(step);
            let q = quantize(x, &c);
            prop_assert!(q.unsigned_abs() <= 127);
            prop_assert_eq!(quantize(-x, &c), -q);
        }

        #[test]
        fn round_trip_within_one_step(x in -31.0f64..31.0, step in 0.05f64..0.25) {
            let c = cfg(step);
            prop_assume!(x.abs() < 127.0 * step);
            prop_assert!((dequantize(quantize(x, &c), &c) - x).abs() <= step);
        }

        #[test]
        fn channel_llr_decreasing(a in 0.001f64..0.499, b in 0.001f64..0.499) {
            prop_assume!(a < b);
            prop_assert!(channel_llr_magnitude(a).unwrap() > channel_llr_magnitude(b).unwrap());
        }
    }
}
