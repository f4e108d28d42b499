//! Acceptance suite. Each criterion prints one PASS/FAIL line to stderr
//! (outside the test capture) and then asserts.
//!
//! The criteria run one at a time: criterion 6 times the decoders, and
//! concurrent tests would skew the ratio.

use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use ldpc_recon::code::fixtures::load_fixture;
use ldpc_recon::decoder::{
    check_magnitude_boxplus, check_magnitude_phi, check_magnitude_tanh, clamp_llr, decode,
    decode_flooding, float_check_outputs, saturating_add_llr, syndrome_of, tau, tau_table,
    vn_update_saturating, Decoder, DecoderConfig, DecoderPath,
};
use ldpc_recon::harness::{
    build_jobs, generate_key_pair, resolve_codes, run_sweep_with, CodeSet, PointResult, SweepConfig,
};
use ldpc_recon::protocol::{
    run_bidirectional_loopback, run_sequential, select_code, CodeContext, MessageKind, Outcome,
    ProtocolConfig, ProtocolError, ProtocolMessage, ReconSession, SessionPlan,
};
use ldpc_recon::quant::{channel_llr_magnitude, QuantizerConfig};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} [{verdict}] {name}: {detail}"
    );
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_tau_table_fidelity() {
    let _g = serial();
    let start = Instant::now();
    let table = tau_table(&QuantizerConfig::default());
    let max_dev = table
        .iter()
        .map(|e| e.deviation.unsigned_abs())
        .max()
        .unwrap();
    let traced = [(10, 10, 8), (0, 5, 0), (3, 63, 3), (100, 100, 61)];
    let traced_ok = traced.iter().all(|&(p, q, want)| tau(p, q, 63) == want);
    let secs = start.elapsed().as_secs_f64();
    let pass = table.len() == 4096 && max_dev <= 1 && traced_ok && secs < 1.0;
    report(
        1,
        "tau table fidelity",
        pass,
        &format!(
            "{} pairs, max |tau - oracle| = {max_dev} (limit 1), hand-traced values {}, {secs:.3}s (limit 1s)",
            table.len(),
            if traced_ok { "exact" } else { "WRONG" }
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 2

/// Extrinsic LLR of one bit given the others and even parity, by summing
/// over every configuration of the others.
fn marginal(others: &[f64]) -> f64 {
    let p1: Vec<f64> = others.iter().map(|&l| 1.0 / (1.0 + l.exp())).collect();
    let (mut even, mut odd) = (0.0, 0.0);
    for cfg in 0u32..(1 << others.len()) {
        let p: f64 = p1
            .iter()
            .enumerate()
            .map(|(j, &q)| if cfg >> j & 1 == 1 { q } else { 1.0 - q })
            .product();
        if cfg.count_ones() % 2 == 0 {
            even += p;
        } else {
            odd += p;
        }
    }
    (even / odd).ln()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_2_check_node_forms_agree() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let degree = rng.random_range(3..=12usize);
        let others: Vec<f64> = (0..degree - 1)
            .map(|_| rng.random_range(1e-3..15.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let (a, b, c) = (
            check_magnitude_tanh(&others),
            check_magnitude_phi(&others),
            check_magnitude_boxplus(&others),
        );
        worst = worst
            .max(rel_err(a, b))
            .max(rel_err(b, c))
            .max(rel_err(a, c));
    }
    let mut worst_marginal = 0.0f64;
    let mut out = [0.0; 5];
    let mut fwd = Vec::new();
    for _ in 0..20_000 {
        let llrs: Vec<f64> = (0..5).map(|_| rng.random_range(-12.0..12.0)).collect();
        float_check_outputs(&llrs, false, &mut fwd, &mut out);
        for k in 0..5 {
            let others: Vec<f64> = (0..5).filter(|&j| j != k).map(|j| llrs[j]).collect();
            worst_marginal = worst_marginal.max(rel_err(out[k], marginal(&others)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-6 && worst_marginal <= 1e-6 && secs < 10.0;
    report(
        2,
        "check-node equation equivalence",
        pass,
        &format!(
            "10^5 checks of degree 3..12: max relative gap {worst:.2e}; degree 5 vs 2^4 marginalization: {worst_marginal:.2e} (limit 1e-6); {secs:.2}s (limit 10s)"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 3

#[test]
fn criterion_3_saturation() {
    let _g = serial();
    let start = Instant::now();
    // soft value at +127, three checks push -50, -40 and -70
    let mut soft = 127i8;
    let mut old = [0i8; 3];
    let mut held = true;
    for (k, inc) in [-50i16, -40, -70].into_iter().enumerate() {
        let var_to_check = soft as i16 - old[k] as i16;
        let new = clamp_llr(old[k] as i16 + inc, 63);
        soft = vn_update_saturating(soft, var_to_check, new, 127);
        old[k] = new;
        held &= soft == 127;
    }
    let mut clamp_ok = true;
    for a in i8::MIN..=i8::MAX {
        for b in i8::MIN..=i8::MAX {
            let want = (a as i32 + b as i32).clamp(-127, 127);
            clamp_ok &= saturating_add_llr(a, b, 127) as i32 == want;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = held && clamp_ok && secs < 1.0;
    report(
        3,
        "saturation correctness",
        pass,
        &format!(
            "+127 under increments summing to -160 {}; 256x256 adds {}; {secs:.3}s (limit 1s)",
            if held { "stays at +127" } else { "WRAPPED" },
            if clamp_ok { "clamp" } else { "DO NOT clamp" }
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 4

#[test]
fn criterion_4_layered_speedup() {
    let _g = serial();
    let start = Instant::now();
    let code = load_fixture("n4096-mb6").unwrap();
    let qber = 0.02;
    let mag = channel_llr_magnitude(qber).unwrap();
    let max_iter = 200;
    let cfg = DecoderConfig {
        path: DecoderPath::Float,
        max_iter,
        quant: QuantizerConfig::default(),
    };
    let (mut layered, mut flooding, mut frames, mut tried) = (0usize, 0usize, 0usize, 0u64);
    while frames < 500 && tried < 2000 {
        let keys = generate_key_pair(code.n(), qber, 4_000 + tried).unwrap();
        tried += 1;
        let syndrome = syndrome_of(&code, &keys.alice).unwrap();
        let llrs: Vec<f64> = keys
            .bob
            .iter()
            .map(|&b| if b == 0 { mag } else { -mag })
            .collect();
        let l = decode(&code, &llrs, &syndrome, cfg).unwrap();
        let f = decode_flooding(&code, &llrs, &syndrome, max_iter).unwrap();
        if l.converged && f.converged {
            layered += l.iterations;
            flooding += f.iterations;
            frames += 1;
        }
    }
    let (ml, mf) = (
        layered as f64 / frames as f64,
        flooding as f64 / frames as f64,
    );
    let secs = start.elapsed().as_secs_f64();
    let pass = frames >= 500 && ml <= 0.7 * mf && secs < 300.0;
    report(
        4,
        "layered convergence speedup",
        pass,
        &format!(
            "n4096-mb6 at QBER 2%: {frames} decodable frames of {tried}; mean iterations layered {ml:.2}, flooding {mf:.2}, ratio {:.3} (limit 0.7); {secs:.0}s (limit 300s)",
            ml / mf
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 5, 6

struct PathSweep {
    results: Vec<PointResult>,
    secs: f64,
}

/// One sweep per decoder path, shared by criteria 5 and 6.
fn sweeps() -> &'static (PathSweep, PathSweep) {
    static SWEEPS: OnceLock<(PathSweep, PathSweep)> = OnceLock::new();
    SWEEPS.get_or_init(|| {
        let base = SweepConfig {
            code: "n4096".into(),
            frames: 1000,
            seed: 5,
            ..SweepConfig::default()
        };
        let run = |path| {
            let cfg = SweepConfig {
                path,
                ..base.clone()
            };
            let codes = resolve_codes(&cfg.code, &cfg.protocol().unwrap()).unwrap();
            let start = Instant::now();
            let results = run_sweep_with(&codes, &cfg).unwrap();
            PathSweep {
                results,
                secs: start.elapsed().as_secs_f64(),
            }
        };
        (run(DecoderPath::Quantized), run(DecoderPath::Float))
    })
}

#[test]
fn criterion_5_quantized_vs_float_fer() {
    let _g = serial();
    let (quant, float) = sweeps();
    let mut pass = quant.secs + float.secs < 1800.0;
    let mut points = Vec::new();
    for (q, f) in quant.results.iter().zip(&float.results) {
        assert_eq!(q.row.qber, f.row.qber);
        let ok = q.row.frames >= 1000
            && q.row.fer <= 2.0 * f.row.fer
            && q.undetected_errors() == 0
            && f.undetected_errors() == 0;
        pass &= ok;
        points.push(format!(
            "{:.0}%: {} vs {}{}",
            q.row.qber * 100.0,
            q.row.fer,
            f.row.fer,
            if ok { "" } else { " (!)" }
        ));
    }
    pass &= quant.results.len() == 8;
    report(
        5,
        "quantized FER <= 2x float FER",
        pass,
        &format!(
            "n4096 family, 1000 frames per point, FER quantized vs float: {}; keys equal on every verified frame; {:.0}s (limit 1800s)",
            points.join(", "),
            quant.secs + float.secs
        ),
    );
    assert!(pass);
}

fn verified_bits(results: &[PointResult]) -> usize {
    results
        .iter()
        .flat_map(|r| &r.outcomes)
        .filter(|o| o.verified)
        .map(|o| o.payload_bits)
        .sum()
}

fn busy_seconds(results: &[PointResult]) -> f64 {
    results.iter().map(|r| r.row.wall_seconds).sum()
}

#[test]
fn criterion_6_throughput_and_memory() {
    let _g = serial();
    let (quant, float) = sweeps();
    let tq = verified_bits(&quant.results) as f64 / busy_seconds(&quant.results) / 1e6;
    let tf = verified_bits(&float.results) as f64 / busy_seconds(&float.results) / 1e6;
    let code = load_fixture("n4096-mb8").unwrap();
    let cells = code.n() + code.num_edges();
    let qbytes =
        Decoder::new(&code, DecoderConfig::with_path(DecoderPath::Quantized)).state_bytes();
    let fbytes = Decoder::new(&code, DecoderConfig::with_path(DecoderPath::Float)).state_bytes();
    let pass = tq >= 2.0 * tf && qbytes == cells && fbytes >= 4 * qbytes;
    report(
        6,
        "throughput ratio and memory",
        pass,
        &format!(
            "quantized {tq:.3} Mbps vs float {tf:.3} Mbps, ratio {:.2} (limit 2); decoder state {qbytes} bytes for {cells} soft values and edge messages, float {fbytes} bytes ({:.0}x)",
            tq / tf,
            fbytes as f64 / qbytes as f64
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_7_efficiency_at_desk_scale() {
    let _g = serial();
    let start = Instant::now();
    let cfg = SweepConfig {
        code: "n16384".into(),
        frames: 300,
        target_f: 1.15,
        seed: 7,
        ..SweepConfig::default()
    };
    let codes = resolve_codes(&cfg.code, &cfg.protocol().unwrap()).unwrap();
    let results = run_sweep_with(&codes, &cfg).unwrap();
    let avg_f = results.iter().map(|r| r.row.avg_efficiency).sum::<f64>() / results.len() as f64;
    let fer_ok = results.iter().all(|r| r.row.fer <= 0.10);
    let secs = start.elapsed().as_secs_f64();
    let pass = results.len() == 8 && avg_f <= 1.30 && fer_ok && secs < 3600.0;
    let points: Vec<String> = results
        .iter()
        .map(|r| {
            format!(
                "{:.0}%: f {:.4} FER {}",
                r.row.qber * 100.0,
                r.row.avg_efficiency,
                r.row.fer
            )
        })
        .collect();
    report(
        7,
        "efficiency at desk scale",
        pass,
        &format!(
            "n16384 family, target_f 1.15, 300 frames per point: average f {avg_f:.4} (limit 1.30), FER per point <= 0.10 {}; [{}]; {secs:.0}s (limit 3600s)",
            if fer_ok { "holds" } else { "VIOLATED" },
            points.join(", ")
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 8

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dir {
    ToBob,
    ToAlice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Injection {
    /// Cut bytes off the end of the payload.
    Truncate,
    /// Readdress to another frame.
    Frame,
    /// Relabel as another message kind.
    Kind,
    /// Deliver the message twice.
    Duplicate,
    /// Deliver an older message from the same sender instead.
    Replay,
    /// Flip bits inside the values; the structure stays valid.
    Corrupt,
}

impl Injection {
    fn structural(self) -> bool {
        self != Injection::Corrupt
    }
}

const KINDS: [MessageKind; 6] = [
    MessageKind::Syndrome,
    MessageKind::RevealRequest,
    MessageKind::Reveal,
    MessageKind::VerifyTag,
    MessageKind::Ack,
    MessageKind::Fail,
];

#[derive(Debug)]
enum End {
    Completed,
    // kept for the failure message of a clean session
    Error(#[allow(dead_code)] ProtocolError),
}

/// Everything needed to start the same session again.
#[derive(Clone)]
struct Recipe {
    ctx: Arc<CodeContext>,
    id: u32,
    qber: f64,
    plan: SessionPlan,
    cfg: ProtocolConfig,
    private_seed: u64,
    alice_key: Vec<u8>,
    bob_key: Vec<u8>,
    seed: u64,
}

impl Recipe {
    fn pair(&self) -> Pair {
        Pair {
            alice: ReconSession::alice(
                self.ctx.clone(),
                self.id,
                self.qber,
                self.plan,
                self.cfg,
                self.private_seed,
            )
            .unwrap(),
            bob: ReconSession::bob(self.ctx.clone(), self.id, self.qber, self.plan, self.cfg)
                .unwrap(),
            recipe: self.clone(),
        }
    }
}

struct Pair {
    alice: ReconSession,
    bob: ReconSession,
    recipe: Recipe,
}

impl Pair {
    fn deliver(
        &mut self,
        dir: Dir,
        msg: &ProtocolMessage,
    ) -> Result<Option<ProtocolMessage>, ProtocolError> {
        match dir {
            Dir::ToBob => self.bob.bob_handle(&self.recipe.bob_key, msg),
            Dir::ToAlice => self.alice.alice_handle(msg),
        }
    }

    fn open(&mut self) -> Result<ProtocolMessage, ProtocolError> {
        self.alice
            .alice_open(&self.recipe.alice_key, self.recipe.seed)
    }

    /// A party reports a verified frame while the payloads differ.
    fn undetected(&self) -> bool {
        self.undetected_against(&self.bob)
    }

    /// `peer` is the Bob whose messages Alice saw; a replayed transcript
    /// carries the original Bob's tags, not this pair's.
    fn undetected_against(&self, peer: &ReconSession) -> bool {
        let key = Some(&self.recipe.alice_key[..]);
        let verified = |s: &ReconSession| s.outcome() == Some(Outcome::Verified);
        (verified(&self.alice) && peer.corrected_payload() != key)
            || (verified(&self.bob) && self.bob.corrected_payload() != key)
    }
}

struct Fuzz {
    rng: ChaCha8Rng,
    family: Vec<Arc<CodeContext>>,
}

impl Fuzz {
    /// Random QBER, target efficiency and reveal schedule.
    fn recipe(&mut self, id: u32) -> Recipe {
        loop {
            let qber = self.rng.random_range(0.01..=0.08);
            let target_f = self.rng.random_range(1.05..1.6);
            let Ok((idx, plan)) = select_code(&self.family, qber, target_f) else {
                continue;
            };
            let ctx = self.family[idx].clone();
            let cfg = ProtocolConfig {
                reveal_fraction: self.rng.random_range(0.01..=0.6),
                max_rounds: self.rng.random_range(0..=10),
                ..ProtocolConfig::default()
            };
            let keys = generate_key_pair(ctx.payload_bits(), qber, self.rng.random()).unwrap();
            return Recipe {
                ctx,
                id,
                qber,
                plan,
                cfg,
                private_seed: self.rng.random(),
                alice_key: keys.alice,
                bob_key: keys.bob,
                seed: self.rng.random(),
            };
        }
    }

    fn mutate(
        &mut self,
        inj: Injection,
        msg: &ProtocolMessage,
        history: &[ProtocolMessage],
        m_bits: usize,
    ) -> Option<Vec<ProtocolMessage>> {
        let mut m = msg.clone();
        match inj {
            Injection::Truncate => {
                if m.payload.is_empty() {
                    return None;
                }
                let cut = self.rng.random_range(1..=m.payload.len());
                m.payload.truncate(m.payload.len() - cut);
            }
            Injection::Frame => m.frame_id ^= self.rng.random_range(1..=u32::MAX),
            Injection::Kind => {
                let others: Vec<MessageKind> =
                    KINDS.iter().copied().filter(|&k| k != m.kind).collect();
                m.kind = others[self.rng.random_range(0..others.len())];
            }
            Injection::Duplicate => return Some(vec![m.clone(), m]),
            Injection::Replay => {
                let older: Vec<&ProtocolMessage> = history.iter().filter(|h| *h != msg).collect();
                if older.is_empty() {
                    return None;
                }
                m = older[self.rng.random_range(0..older.len())].clone();
            }
            Injection::Corrupt => match m.kind {
                MessageKind::Syndrome => {
                    // seed bits or real syndrome bits, never the padding
                    let bit = self.rng.random_range(0..64 + m_bits);
                    m.payload[bit / 8] ^= 1 << (bit % 8);
                }
                MessageKind::VerifyTag => {
                    let bit = self.rng.random_range(0..64);
                    m.payload[bit / 8] ^= 1 << (bit % 8);
                }
                MessageKind::Reveal => {
                    let count = u32::from_le_bytes(m.payload[..4].try_into().unwrap()) as usize;
                    let k = self.rng.random_range(0..count);
                    m.payload[4 + 5 * k + 4] ^= 1;
                }
                _ => return None,
            },
        }
        Some(vec![m])
    }

    /// Runs one session, injecting at delivery `at` when that delivery
    /// happens. Returns how it ended, whether the injection took place, and
    /// what each party received.
    fn run(
        &mut self,
        pair: &mut Pair,
        inj: Option<(usize, Injection)>,
    ) -> (End, bool, Vec<(Dir, ProtocolMessage)>) {
        let m_bits = pair.recipe.ctx.code().m();
        let mut transcript = Vec::new();
        let mut history: [Vec<ProtocolMessage>; 2] = [Vec::new(), Vec::new()];
        let mut next = match pair.open() {
            Ok(m) => Some((Dir::ToBob, m)),
            Err(e) => return (End::Error(e), false, transcript),
        };
        let mut step = 0;
        let mut injected = false;
        while let Some((dir, msg)) = next.take() {
            assert!(step < 64, "session did not terminate");
            let slot = usize::from(dir == Dir::ToAlice);
            let mut deliveries = vec![msg.clone()];
            if let Some((at, kind)) = inj {
                if at == step {
                    if let Some(d) = self.mutate(kind, &msg, &history[slot], m_bits) {
                        injected = true;
                        deliveries = d;
                    }
                }
            }
            history[slot].push(msg);
            step += 1;
            let mut reply = None;
            for m in deliveries {
                transcript.push((dir, m.clone()));
                match pair.deliver(dir, &m) {
                    Ok(r) => reply = r,
                    Err(e) => return (End::Error(e), injected, transcript),
                }
            }
            let back = if dir == Dir::ToBob {
                Dir::ToAlice
            } else {
                Dir::ToBob
            };
            next = reply.map(|r| (back, r));
        }
        (End::Completed, injected, transcript)
    }
}

/// Feeds a recorded transcript to fresh sessions in the given order.
fn replay(pair: &mut Pair, order: &[(Dir, ProtocolMessage)]) -> Result<(), ProtocolError> {
    pair.open()?;
    for (dir, msg) in order {
        pair.deliver(*dir, msg)?;
    }
    Ok(())
}

fn per_recipient(order: &[(Dir, ProtocolMessage)], dir: Dir) -> Vec<&ProtocolMessage> {
    order
        .iter()
        .filter(|(d, _)| *d == dir)
        .map(|(_, m)| m)
        .collect()
}

#[test]
fn criterion_8_protocol_soundness() {
    let _g = serial();
    let start = Instant::now();
    let proto = ProtocolConfig::default();
    let codes: CodeSet = resolve_codes("n1024", &proto).unwrap();
    let mut fuzz = Fuzz {
        rng: ChaCha8Rng::seed_from_u64(8),
        family: codes.contexts.clone(),
    };
    let injections = [
        Injection::Truncate,
        Injection::Frame,
        Injection::Kind,
        Injection::Duplicate,
        Injection::Replay,
        Injection::Corrupt,
    ];
    let (mut sessions, mut undetected, mut malformed, mut silent) = (0, 0, 0, 0);
    let (mut shuffled, mut shuffle_silent, mut truncated, mut truncated_silent) = (0, 0, 0, 0);
    let mut completed = 0;
    let mut wire_cuts = 0;
    let mut wire_silent = 0;
    for id in 0..10_000u32 {
        let recipe = fuzz.recipe(id);
        let mut pair = recipe.pair();
        sessions += 1;
        let inj = if fuzz.rng.random_bool(0.6) {
            let kind = injections[fuzz.rng.random_range(0..injections.len())];
            Some((fuzz.rng.random_range(0..5usize), kind))
        } else {
            None
        };
        let (end, injected, transcript) = fuzz.run(&mut pair, inj);
        undetected += usize::from(pair.undetected());
        let structural = injected && inj.is_some_and(|(_, k)| k.structural());
        if structural {
            malformed += 1;
            if matches!(end, End::Completed) {
                silent += 1;
            }
        }
        if inj.is_none() || !injected {
            assert!(
                matches!(end, End::Completed),
                "clean session failed: {end:?}"
            );
            completed += 1;
            // shuffled transcript: any change in what a party sees must be refused
            if transcript.len() >= 2 {
                let mut order = transcript.clone();
                for i in (1..order.len()).rev() {
                    let j = fuzz.rng.random_range(0..=i);
                    order.swap(i, j);
                }
                let changed = [Dir::ToBob, Dir::ToAlice]
                    .iter()
                    .any(|&d| per_recipient(&order, d) != per_recipient(&transcript, d));
                if changed {
                    shuffled += 1;
                    let mut fresh = recipe.pair();
                    if replay(&mut fresh, &order).is_ok() {
                        shuffle_silent += 1;
                    }
                    undetected += usize::from(fresh.undetected_against(&pair.bob));
                }
            }
            // truncated transcript: the sessions stay unfinished and say so
            let cut = fuzz.rng.random_range(0..transcript.len());
            let mut fresh = recipe.pair();
            if replay(&mut fresh, &transcript[..cut]).is_ok() {
                truncated += 1;
                let unfinished = fresh.alice.outcome().is_none() || fresh.bob.outcome().is_none();
                let refuses = matches!(
                    fresh.alice.efficiency_of(None),
                    Err(ProtocolError::Incomplete(_))
                ) || matches!(
                    fresh.bob.efficiency_of(None),
                    Err(ProtocolError::Incomplete(_))
                );
                if !(unfinished && refuses) {
                    truncated_silent += 1;
                }
            }
            // a frame cut short on the byte stream never decodes
            let (_, msg) = &transcript[fuzz.rng.random_range(0..transcript.len())];
            let bytes = msg.encode();
            let keep = fuzz.rng.random_range(0..bytes.len());
            wire_cuts += 1;
            if ProtocolMessage::decode(&bytes[..keep]).is_ok() {
                wire_silent += 1;
            }
        }
    }
    let fuzz_secs = start.elapsed().as_secs_f64();

    // bidirectional batches against the sequential baseline
    let ctx = &codes.contexts[3];
    let (_, plan) = select_code(std::slice::from_ref(ctx), 0.03, 1.2).unwrap();
    let jobs = build_jobs(ctx, plan, 0.03, 0.03, 40, 88).unwrap();
    let sequential = run_sequential(&jobs, &proto);
    let bidirectional = run_bidirectional_loopback(&jobs, &proto);
    let same = sequential == bidirectional;

    let pass = undetected == 0
        && silent == 0
        && shuffle_silent == 0
        && truncated_silent == 0
        && wire_silent == 0
        && same
        && sessions == 10_000;
    report(
        8,
        "protocol soundness",
        pass,
        &format!(
            "{sessions} fuzzed sessions ({completed} clean, {malformed} with structural injections, {} value corruptions): {undetected} verified with unequal keys; {silent} malformed sequences accepted; {shuffled} shuffled transcripts, {shuffle_silent} accepted; {truncated} truncated transcripts, {truncated_silent} not reported incomplete; {wire_cuts} cut byte streams, {wire_silent} decoded; bidirectional == sequential on {} frames: {same}; {fuzz_secs:.0}s",
            sessions - completed - malformed,
            jobs.len()
        ),
    );
    assert!(pass);
}
