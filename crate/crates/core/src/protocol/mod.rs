//! Rate-adaptive two-party reconciliation.
//!
//! Alice (key holder) sends the syndrome of a frame word made of her
//! payload bits plus `d` reserved positions taken from the front of the
//! puncture order. Of those, `p` are punctured (filled with private random
//! bits, LLR 0 at Bob) and `s` shortened (filled from a pattern both sides
//! derive from the public frame seed, LLR ±max at Bob). When Bob fails to
//! decode he asks for the next batch of punctured values, which turns them
//! into shortened ones. A 64-bit tag closes each frame.
//!
//! Sessions are sans-IO state machines; [`driver`] moves their messages
//! over byte streams.

pub mod driver;
mod session;
pub mod transport;
mod verify;
pub mod wire;

use thiserror::Error;

use crate::code::CodeError;
use crate::decoder::DecodeError;
use crate::quant::QuantError;

pub use driver::{
    run_bidirectional, run_bidirectional_loopback, run_frame_local, run_sequential, FrameJob,
    FrameOutcome,
};
pub use session::{
    plan_session, raw_puncture_count, select_code, shortened_pattern, BobStep, CodeContext,
    EfficiencyReport, Outcome, Phase, ProtocolConfig, ReconSession, Role, SessionPlan,
    DEFAULT_D_FRACTION, DEFAULT_MAX_ROUNDS, DEFAULT_REVEAL_FRACTION, TAG_BITS,
};
pub use verify::{gf64_mul, mix64, payload_tag};
pub use wire::{MessageKind, ProtocolMessage, WireError};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("operation requires the {expected:?} role")]
    WrongRole { expected: Role },
    #[error("{op} is not allowed in phase {phase:?}")]
    State { op: &'static str, phase: Phase },
    #[error("unexpected {kind:?} message in phase {phase:?}")]
    Unexpected { kind: MessageKind, phase: Phase },
    #[error("message for frame {got}, session is frame {expected}")]
    FrameMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("malformed {0:?} message")]
    Malformed(MessageKind),
    #[error("key has {got} bits, expected {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error("position {0} is not currently punctured")]
    NotPunctured(u32),
    #[error("reveal request names no positions")]
    EmptyRequest,
    #[error("reveal request is not the next batch in puncture order")]
    OffSchedule,
    #[error("reveal does not answer the outstanding request")]
    RevealMismatch,
    #[error("all {0} reveal rounds are used up")]
    RoundLimit(u32),
    #[error(
        "target unreachable with this code: p = {raw_p:.1} lies outside [0, {}]; \
         use a {} rate base code",
        clamped.d,
        if *raw_p < 0.0 { "lower" } else { "higher" }
    )]
    Unreachable { raw_p: f64, clamped: SessionPlan },
    #[error("no code in the family serves qber {qber} at target f {target_f}")]
    NoSuitableCode { qber: f64, target_f: f64 },
    #[error("target_f must be a finite value >= 1, got {0}")]
    TargetF(f64),
    #[error("d = {d} reserved positions do not fit a code of length {n}")]
    ReservedCount { d: usize, n: usize },
    #[error("plan {plan:?} does not match the {reserved} reserved positions")]
    PlanMismatch { plan: SessionPlan, reserved: usize },
    #[error("session is not finished (phase {0:?})")]
    Incomplete(Phase),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Quant(#[from] QuantError),
}
