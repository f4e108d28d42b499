//! Per-frame protocol state machines for both roles.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::verify::{mix64, payload_tag};
use super::wire::{MessageKind, ProtocolMessage};
use super::ProtocolError;
use crate::code::{puncture_order, ParityCheckCode};
use crate::decoder::{syndrome_of, Decoder, DecoderConfig, KNOWN_BIT_LLR};
use crate::quant::{binary_entropy, channel_llr_magnitude, QuantError};

pub const DEFAULT_D_FRACTION: f64 = 0.1;
pub const DEFAULT_REVEAL_FRACTION: f64 = 0.125;
pub const DEFAULT_MAX_ROUNDS: u32 = 8;
pub const TAG_BITS: usize = 64;

/// Knobs shared by every frame of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Reserved positions as a fraction of `n`.
    pub d_fraction: f64,
    /// Positions revealed per round as a fraction of `d`.
    pub reveal_fraction: f64,
    pub max_rounds: u32,
    pub decoder: DecoderConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            d_fraction: DEFAULT_D_FRACTION,
            reveal_fraction: DEFAULT_REVEAL_FRACTION,
            max_rounds: DEFAULT_MAX_ROUNDS,
            decoder: DecoderConfig::default(),
        }
    }
}

impl ProtocolConfig {
    pub fn reserved_count(&self, n: usize) -> usize {
        (n as f64 * self.d_fraction).round() as usize
    }

    pub fn reveal_batch(&self, d: usize) -> usize {
        ((d as f64 * self.reveal_fraction).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Tags matched.
    Verified,
    /// Decoding gave up after the last reveal round.
    Failed,
    /// The decoder converged to a different payload; caught by the tag.
    TagMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Alice before sending the syndrome.
    Idle,
    /// Bob before receiving the syndrome.
    Listening,
    /// Alice waiting for a request, a tag or a failure notice.
    AwaitingReply,
    /// Bob waiting for the values he asked for.
    AwaitingReveal,
    /// Bob converged and has not sent his tag yet.
    Decoded,
    /// Bob waiting for Alice's tag.
    AwaitingTag,
    Finished(Outcome),
}

/// Split of the `d` reserved positions: `p` punctured, `s` shortened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub d: usize,
    pub p: usize,
    pub s: usize,
}

/// A code with its reserved positions resolved, shared by every frame that
/// uses it.
#[derive(Debug, Clone)]
pub struct CodeContext {
    code: Arc<ParityCheckCode>,
    reserved: Vec<u32>,
    payload: Vec<u32>,
    /// Index into `reserved` for each variable, `u32::MAX` for payload.
    slot: Vec<u32>,
}

impl CodeContext {
    pub fn new(code: Arc<ParityCheckCode>, d: usize) -> Result<Self, ProtocolError> {
        let reserved = puncture_order(&code, d)?.as_slice().to_vec();
        let mut slot = vec![u32::MAX; code.n()];
        for (k, &j) in reserved.iter().enumerate() {
            slot[j as usize] = k as u32;
        }
        let payload = (0..code.n() as u32)
            .filter(|&j| slot[j as usize] == u32::MAX)
            .collect();
        Ok(Self {
            code,
            reserved,
            payload,
            slot,
        })
    }

    pub fn with_config(
        code: Arc<ParityCheckCode>,
        cfg: &ProtocolConfig,
    ) -> Result<Self, ProtocolError> {
        let d = cfg.reserved_count(code.n());
        Self::new(code, d)
    }

    pub fn code(&self) -> &ParityCheckCode {
        &self.code
    }

    pub fn shared_code(&self) -> &Arc<ParityCheckCode> {
        &self.code
    }

    pub fn d(&self) -> usize {
        self.reserved.len()
    }

    /// First `d` entries of the puncture order.
    pub fn reserved(&self) -> &[u32] {
        &self.reserved
    }

    pub fn payload_positions(&self) -> &[u32] {
        &self.payload
    }

    pub fn payload_bits(&self) -> usize {
        self.payload.len()
    }

    fn slot_of(&self, pos: u32) -> Option<usize> {
        match self.slot.get(pos as usize) {
            Some(&k) if k != u32::MAX => Some(k as usize),
            _ => None,
        }
    }
}

/// Unrounded punctured count `m − f·h2(qber)·(n − d)`.
pub fn raw_puncture_count(
    code: &ParityCheckCode,
    qber_estimate: f64,
    target_f: f64,
    d: usize,
) -> f64 {
    let payload = (code.n() - d) as f64;
    code.m() as f64 - target_f * binary_entropy(qber_estimate) * payload
}

/// Chooses how many reserved positions to puncture so the initial leakage
/// is `target_f` times the Shannon bound.
pub fn plan_session(
    code: &ParityCheckCode,
    qber_estimate: f64,
    target_f: f64,
    d: usize,
) -> Result<SessionPlan, ProtocolError> {
    if !(qber_estimate > 0.0 && qber_estimate < 0.5) {
        return Err(QuantError::QberDomain(qber_estimate).into());
    }
    if !(target_f >= 1.0) || !target_f.is_finite() {
        return Err(ProtocolError::TargetF(target_f));
    }
    if d >= code.n() {
        return Err(ProtocolError::ReservedCount { d, n: code.n() });
    }
    let raw = raw_puncture_count(code, qber_estimate, target_f, d);
    let rounded = raw.round();
    let p = rounded.clamp(0.0, d as f64) as usize;
    let plan = SessionPlan { d, p, s: d - p };
    if rounded < 0.0 || rounded > d as f64 {
        return Err(ProtocolError::Unreachable {
            raw_p: raw,
            clamped: plan,
        });
    }
    Ok(plan)
}

/// Picks the family member whose plan needs no clamping and punctures the
/// most positions.
///
/// Every member starts at the same leakage, so what differs is the reveal
/// headroom: only punctured positions can be disclosed after a failure, and
/// once all of them are known the frame sits at the member's mother rate.
/// The lowest-rate reachable member leaves the most room.
pub fn select_code(
    family: &[Arc<CodeContext>],
    qber_estimate: f64,
    target_f: f64,
) -> Result<(usize, SessionPlan), ProtocolError> {
    let mut best: Option<(f64, usize, SessionPlan)> = None;
    for (idx, ctx) in family.iter().enumerate() {
        let plan = match plan_session(ctx.code(), qber_estimate, target_f, ctx.d()) {
            Ok(plan) => plan,
            Err(ProtocolError::Unreachable { .. }) => continue,
            Err(e) => return Err(e),
        };
        let raw = raw_puncture_count(ctx.code(), qber_estimate, target_f, ctx.d());
        if best.as_ref().is_none_or(|(r, _, _)| raw > *r) {
            best = Some((raw, idx, plan));
        }
    }
    best.map(|(_, idx, plan)| (idx, plan))
        .ok_or(ProtocolError::NoSuitableCode {
            qber: qber_estimate,
            target_f,
        })
}

/// Shortened-bit pattern shared through the frame seed.
pub fn shortened_pattern(seed: u64, d: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed));
    (0..d).map(|_| rng.random_range(0..2u8)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BobStep {
    /// Converged; carries the corrected payload.
    Decoded(Vec<u8>),
    NeedsMore(ProtocolMessage),
    Failed(ProtocolMessage),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub f: f64,
    pub leaked_bits: usize,
    pub payload_bits: usize,
    pub qber: f64,
    /// True when no true QBER was supplied and the estimate was used.
    pub qber_is_estimate: bool,
    pub rounds: u32,
}

/// One frame's protocol state, for either role.
#[derive(Debug, Clone)]
pub struct ReconSession {
    role: Role,
    ctx: Arc<CodeContext>,
    frame_id: u32,
    qber_estimate: f64,
    plan: SessionPlan,
    cfg: ProtocolConfig,
    phase: Phase,
    round: u32,
    /// Per reserved index: value still unknown to Bob.
    punctured: Vec<bool>,
    /// Per reserved index: bit value where known.
    known: Vec<u8>,
    disclosed: Vec<(u32, u8)>,
    leaked_bits: usize,
    tag_bits: usize,
    seed: u64,
    private_seed: u64,
    key: Vec<u8>,
    syndrome: Vec<u8>,
    pending: Vec<u32>,
    corrected: Option<Vec<u8>>,
    iterations: usize,
    attempts: usize,
}

impl ReconSession {
    fn new(
        role: Role,
        ctx: Arc<CodeContext>,
        frame_id: u32,
        qber_estimate: f64,
        plan: SessionPlan,
        cfg: ProtocolConfig,
        private_seed: u64,
    ) -> Result<Self, ProtocolError> {
        if plan.d != ctx.d() || plan.p + plan.s != plan.d {
            return Err(ProtocolError::PlanMismatch {
                plan,
                reserved: ctx.d(),
            });
        }
        channel_llr_magnitude(qber_estimate)?;
        cfg.decoder.quant.validate()?;
        let d = plan.d;
        Ok(Self {
            role,
            frame_id,
            qber_estimate,
            plan,
            cfg,
            phase: match role {
                Role::Alice => Phase::Idle,
                Role::Bob => Phase::Listening,
            },
            round: 0,
            punctured: (0..d).map(|k| k < plan.p).collect(),
            known: vec![0; d],
            disclosed: Vec::new(),
            leaked_bits: 0,
            tag_bits: 0,
            seed: 0,
            private_seed,
            key: Vec::new(),
            syndrome: Vec::new(),
            pending: Vec::new(),
            corrected: None,
            iterations: 0,
            attempts: 0,
            ctx,
        })
    }

    /// Key holder. `private_seed` drives the punctured fill, which Bob never
    /// learns unless it is revealed.
    pub fn alice(
        ctx: Arc<CodeContext>,
        frame_id: u32,
        qber_estimate: f64,
        plan: SessionPlan,
        cfg: ProtocolConfig,
        private_seed: u64,
    ) -> Result<Self, ProtocolError> {
        Self::new(
            Role::Alice,
            ctx,
            frame_id,
            qber_estimate,
            plan,
            cfg,
            private_seed,
        )
    }

    pub fn bob(
        ctx: Arc<CodeContext>,
        frame_id: u32,
        qber_estimate: f64,
        plan: SessionPlan,
        cfg: ProtocolConfig,
    ) -> Result<Self, ProtocolError> {
        Self::new(Role::Bob, ctx, frame_id, qber_estimate, plan, cfg, 0)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn frame_id(&self) -> u32 {
        self.frame_id
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn plan(&self) -> SessionPlan {
        self.plan
    }

    pub fn context(&self) -> &Arc<CodeContext> {
        &self.ctx
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn leaked_bits(&self) -> usize {
        self.leaked_bits
    }

    pub fn revealed_count(&self) -> usize {
        self.disclosed.len()
    }

    /// Positions whose values were transmitted, in order of disclosure.
    pub fn disclosed(&self) -> &[(u32, u8)] {
        &self.disclosed
    }

    pub fn punctured_positions(&self) -> Vec<u32> {
        self.reserved_where(true)
    }

    pub fn shortened_positions(&self) -> Vec<u32> {
        self.reserved_where(false)
    }

    fn reserved_where(&self, punctured: bool) -> Vec<u32> {
        self.ctx
            .reserved()
            .iter()
            .zip(&self.punctured)
            .filter(|&(_, &p)| p == punctured)
            .map(|(&j, _)| j)
            .collect()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.phase {
            Phase::Finished(o) => Some(o),
            _ => None,
        }
    }

    pub fn corrected_payload(&self) -> Option<&[u8]> {
        self.corrected.as_deref()
    }

    /// Decoder iterations summed over all attempts.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    fn require_role(&self, role: Role) -> Result<(), ProtocolError> {
        if self.role != role {
            return Err(ProtocolError::WrongRole { expected: role });
        }
        Ok(())
    }

    fn require_frame(&self, msg: &ProtocolMessage) -> Result<(), ProtocolError> {
        if msg.frame_id != self.frame_id {
            return Err(ProtocolError::FrameMismatch {
                expected: self.frame_id,
                got: msg.frame_id,
            });
        }
        Ok(())
    }

    fn unexpected(&self, kind: MessageKind) -> ProtocolError {
        ProtocolError::Unexpected {
            kind,
            phase: self.phase,
        }
    }

    fn check_key(&self, key: &[u8]) -> Result<(), ProtocolError> {
        if key.len() != self.ctx.payload_bits() {
            return Err(ProtocolError::KeyLength {
                expected: self.ctx.payload_bits(),
                got: key.len(),
            });
        }
        Ok(())
    }

    /// Alice: build the frame word and send its syndrome with `seed`.
    pub fn alice_open(&mut self, key: &[u8], seed: u64) -> Result<ProtocolMessage, ProtocolError> {
        self.require_role(Role::Alice)?;
        if self.phase != Phase::Idle {
            return Err(ProtocolError::State {
                op: "alice_open",
                phase: self.phase,
            });
        }
        self.check_key(key)?;
        let code = self.ctx.code();
        let pattern = shortened_pattern(seed, self.plan.d);
        let mut fill = ChaCha8Rng::seed_from_u64(self.private_seed);
        for (k, value) in self.known.iter_mut().enumerate() {
            *value = if k < self.plan.p {
                fill.random_range(0..2u8)
            } else {
                pattern[k]
            };
        }
        let word = self.frame_word(key);
        let syndrome = syndrome_of(code, &word)?;
        self.seed = seed;
        self.key = key.to_vec();
        self.leaked_bits += code.m();
        self.phase = Phase::AwaitingReply;
        Ok(ProtocolMessage::syndrome(self.frame_id, seed, &syndrome))
    }

    fn frame_word(&self, key: &[u8]) -> Vec<u8> {
        let mut word = vec![0u8; self.ctx.code().n()];
        for (&j, &b) in self.ctx.payload_positions().iter().zip(key) {
            word[j as usize] = b & 1;
        }
        for (&j, &b) in self.ctx.reserved().iter().zip(&self.known) {
            word[j as usize] = b;
        }
        word
    }

    /// Alice: answer a reveal request with the requested values.
    pub fn alice_reveal(
        &mut self,
        msg: &ProtocolMessage,
    ) -> Result<ProtocolMessage, ProtocolError> {
        self.require_role(Role::Alice)?;
        self.require_frame(msg)?;
        if self.phase != Phase::AwaitingReply || msg.kind != MessageKind::RevealRequest {
            return Err(self.unexpected(msg.kind));
        }
        if self.round >= self.cfg.max_rounds {
            return Err(ProtocolError::RoundLimit(self.cfg.max_rounds));
        }
        let positions = msg.parse_reveal_request()?;
        if positions.is_empty() {
            return Err(ProtocolError::EmptyRequest);
        }
        let mut slots = Vec::with_capacity(positions.len());
        let mut seen = vec![false; self.plan.d];
        for &pos in &positions {
            match self.ctx.slot_of(pos) {
                Some(k) if self.punctured[k] && !seen[k] => {
                    seen[k] = true;
                    slots.push(k);
                }
                _ => return Err(ProtocolError::NotPunctured(pos)),
            }
        }
        // Bob asks for the earliest punctured slots, one batch at most
        let in_order = (0..self.plan.d)
            .filter(|&k| self.punctured[k])
            .take(slots.len());
        if slots.len() > self.cfg.reveal_batch(self.plan.d) || !in_order.eq(slots.iter().copied()) {
            return Err(ProtocolError::OffSchedule);
        }
        let items: Vec<(u32, u8)> = positions
            .iter()
            .zip(&slots)
            .map(|(&pos, &k)| (pos, self.known[k]))
            .collect();
        for &k in &slots {
            self.punctured[k] = false;
        }
        self.disclosed.extend(&items);
        self.leaked_bits += items.len();
        self.round += 1;
        Ok(ProtocolMessage::reveal(self.frame_id, &items))
    }

    /// Alice: compare Bob's tag with hers and answer with hers.
    pub fn alice_verify(
        &mut self,
        msg: &ProtocolMessage,
    ) -> Result<ProtocolMessage, ProtocolError> {
        self.require_role(Role::Alice)?;
        self.require_frame(msg)?;
        if self.phase != Phase::AwaitingReply || msg.kind != MessageKind::VerifyTag {
            return Err(self.unexpected(msg.kind));
        }
        let theirs = msg.parse_verify_tag()?;
        let mine = payload_tag(&self.key, self.seed);
        self.finish_verify(mine == theirs);
        Ok(ProtocolMessage::verify_tag(self.frame_id, mine))
    }

    fn finish_verify(&mut self, equal: bool) {
        self.tag_bits = TAG_BITS;
        self.leaked_bits += TAG_BITS;
        self.phase = Phase::Finished(if equal {
            Outcome::Verified
        } else {
            Outcome::TagMismatch
        });
    }

    fn accept_fail(&mut self, msg: &ProtocolMessage) -> Result<(), ProtocolError> {
        self.require_frame(msg)?;
        match self.phase {
            Phase::Idle | Phase::Listening | Phase::Finished(_) => Err(self.unexpected(msg.kind)),
            _ => {
                if !msg.payload.is_empty() {
                    return Err(ProtocolError::Malformed(msg.kind));
                }
                self.phase = Phase::Finished(Outcome::Failed);
                Ok(())
            }
        }
    }

    /// Alice: dispatch one incoming message; `None` means she has nothing
    /// to send.
    pub fn alice_handle(
        &mut self,
        msg: &ProtocolMessage,
    ) -> Result<Option<ProtocolMessage>, ProtocolError> {
        self.require_role(Role::Alice)?;
        match msg.kind {
            MessageKind::RevealRequest => self.alice_reveal(msg).map(Some),
            MessageKind::VerifyTag => self.alice_verify(msg).map(Some),
            MessageKind::Fail => self.accept_fail(msg).map(|_| None),
            kind => {
                self.require_frame(msg)?;
                Err(self.unexpected(kind))
            }
        }
    }

    /// Bob: absorb a syndrome or a reveal, then try to decode.
    pub fn bob_attempt(
        &mut self,
        key: &[u8],
        msg: &ProtocolMessage,
    ) -> Result<BobStep, ProtocolError> {
        self.require_role(Role::Bob)?;
        self.require_frame(msg)?;
        self.check_key(key)?;
        match (self.phase, msg.kind) {
            (Phase::Listening, MessageKind::Syndrome) => {
                let (seed, syndrome) = msg.parse_syndrome(self.ctx.code().m())?;
                let pattern = shortened_pattern(seed, self.plan.d);
                for k in self.plan.p..self.plan.d {
                    self.known[k] = pattern[k];
                }
                self.seed = seed;
                self.syndrome = syndrome;
                self.leaked_bits += self.ctx.code().m();
            }
            (Phase::AwaitingReveal, MessageKind::Reveal) => {
                let items = msg.parse_reveal()?;
                let answered = items.len() == self.pending.len()
                    && items.iter().zip(&self.pending).all(|(&(p, _), &q)| p == q);
                if !answered {
                    return Err(ProtocolError::RevealMismatch);
                }
                for &(pos, v) in &items {
                    let k = self
                        .ctx
                        .slot_of(pos)
                        .expect("requested positions are reserved");
                    self.punctured[k] = false;
                    self.known[k] = v;
                }
                self.disclosed.extend(&items);
                self.leaked_bits += items.len();
                self.round += 1;
                self.pending.clear();
            }
            (_, kind) => return Err(self.unexpected(kind)),
        }
        self.try_decode(key)
    }

    fn try_decode(&mut self, key: &[u8]) -> Result<BobStep, ProtocolError> {
        let code = self.ctx.code();
        let channel = channel_llr_magnitude(self.qber_estimate)?;
        let signed = |b: u8, mag: f64| if b & 1 == 1 { -mag } else { mag };
        let mut llrs = vec![0.0f64; code.n()];
        for (&j, &b) in self.ctx.payload_positions().iter().zip(key) {
            llrs[j as usize] = signed(b, channel);
        }
        for (k, &j) in self.ctx.reserved().iter().enumerate() {
            if !self.punctured[k] {
                llrs[j as usize] = signed(self.known[k], KNOWN_BIT_LLR);
            }
        }
        let result = Decoder::new(code, self.cfg.decoder).decode(&llrs, &self.syndrome)?;
        self.iterations += result.iterations;
        self.attempts += 1;
        if result.converged {
            let payload: Vec<u8> = self
                .ctx
                .payload_positions()
                .iter()
                .map(|&j| result.word[j as usize])
                .collect();
            self.corrected = Some(payload.clone());
            self.phase = Phase::Decoded;
            return Ok(BobStep::Decoded(payload));
        }
        let remaining = self.punctured.iter().any(|&p| p);
        if self.round < self.cfg.max_rounds && remaining {
            let batch = self.cfg.reveal_batch(self.plan.d);
            self.pending = self
                .ctx
                .reserved()
                .iter()
                .zip(&self.punctured)
                .filter(|&(_, &p)| p)
                .map(|(&j, _)| j)
                .take(batch)
                .collect();
            self.phase = Phase::AwaitingReveal;
            return Ok(BobStep::NeedsMore(ProtocolMessage::reveal_request(
                self.frame_id,
                &self.pending,
            )));
        }
        self.phase = Phase::Finished(Outcome::Failed);
        Ok(BobStep::Failed(ProtocolMessage::fail(self.frame_id)))
    }

    /// Bob: tag of the corrected payload.
    pub fn bob_verify_tag(&mut self) -> Result<ProtocolMessage, ProtocolError> {
        self.require_role(Role::Bob)?;
        if self.phase != Phase::Decoded {
            return Err(ProtocolError::State {
                op: "bob_verify_tag",
                phase: self.phase,
            });
        }
        let payload = self
            .corrected
            .as_deref()
            .expect("decoded phase has a payload");
        let tag = payload_tag(payload, self.seed);
        self.phase = Phase::AwaitingTag;
        Ok(ProtocolMessage::verify_tag(self.frame_id, tag))
    }

    /// Bob: compare Alice's tag; `true` when the frame is verified.
    pub fn bob_finish(&mut self, msg: &ProtocolMessage) -> Result<bool, ProtocolError> {
        self.require_role(Role::Bob)?;
        self.require_frame(msg)?;
        if self.phase != Phase::AwaitingTag || msg.kind != MessageKind::VerifyTag {
            return Err(self.unexpected(msg.kind));
        }
        let theirs = msg.parse_verify_tag()?;
        let payload = self.corrected.as_deref().expect("tag phase has a payload");
        let equal = payload_tag(payload, self.seed) == theirs;
        self.finish_verify(equal);
        Ok(equal)
    }

    /// Bob: dispatch one incoming message.
    pub fn bob_handle(
        &mut self,
        key: &[u8],
        msg: &ProtocolMessage,
    ) -> Result<Option<ProtocolMessage>, ProtocolError> {
        self.require_role(Role::Bob)?;
        match msg.kind {
            MessageKind::Syndrome | MessageKind::Reveal => match self.bob_attempt(key, msg)? {
                BobStep::Decoded(_) => self.bob_verify_tag().map(Some),
                BobStep::NeedsMore(m) | BobStep::Failed(m) => Ok(Some(m)),
            },
            MessageKind::VerifyTag => self.bob_finish(msg).map(|_| None),
            MessageKind::Fail => self.accept_fail(msg).map(|_| None),
            kind => {
                self.require_frame(msg)?;
                Err(self.unexpected(kind))
            }
        }
    }

    /// Efficiency of a finished session, against `qber_true` when given.
    pub fn efficiency_of(&self, qber_true: Option<f64>) -> Result<EfficiencyReport, ProtocolError> {
        if self.outcome().is_none() {
            return Err(ProtocolError::Incomplete(self.phase));
        }
        let qber = qber_true.unwrap_or(self.qber_estimate);
        if !(qber > 0.0 && qber < 0.5) {
            return Err(QuantError::QberDomain(qber).into());
        }
        let payload_bits = self.ctx.payload_bits();
        let numerator = self.ctx.code().m() as f64 - self.plan.p as f64
            + self.disclosed.len() as f64
            + self.tag_bits as f64;
        Ok(EfficiencyReport {
            f: numerator / (payload_bits as f64 * binary_entropy(qber)),
            leaked_bits: self.leaked_bits,
            payload_bits,
            qber,
            qber_is_estimate: qber_true.is_none(),
            rounds: self.round,
        })
    }
}
