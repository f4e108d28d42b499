//! Quantized LDPC information reconciliation for QKD post-processing.
//!
//! - [`code`]: QC-LDPC construction, alist I/O, girth and puncturing order.
//! - [`quant`]: BSC channel LLRs and the 8-bit fixed-point LLR format.
//! - [`decoder`]: layered float and quantized (τ / saturating) decoders.
//! - [`protocol`]: rate-adaptive two-party reconciliation and its wire format.
//! - [`harness`]: key generation, QBER sweeps, metrics and CSV output.

pub mod code;
pub mod decoder;
pub mod harness;
pub mod protocol;
pub mod quant;
