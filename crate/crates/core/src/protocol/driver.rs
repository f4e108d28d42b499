//! Frame drivers: a single-threaded in-process pump, blocking per-role
//! loops over a transport, and the bi-directional scheduler.

use std::io::{BufReader, Read};
use std::sync::mpsc::{channel, Receiver};
use std::sync::{Arc, Mutex};
use std::thread;

use serde::Serialize;

use super::session::{CodeContext, Outcome, ProtocolConfig, ReconSession, Role, SessionPlan};
use super::transport::{loopback_pair, CloseWrite, Transport, TransportError};
use super::wire::ProtocolMessage;
use super::ProtocolError;

/// Everything needed to reconcile one frame, for both parties.
#[derive(Debug, Clone)]
pub struct FrameJob {
    pub frame_id: u32,
    pub ctx: Arc<CodeContext>,
    pub plan: SessionPlan,
    pub qber_estimate: f64,
    /// Injected QBER, used only for the efficiency figure.
    pub qber_true: f64,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    /// Public frame seed (shortened pattern and tag point).
    pub seed: u64,
    /// Alice's private seed for the punctured fill.
    pub private_seed: u64,
}

/// Result of one frame, merged from both parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameOutcome {
    pub frame_id: u32,
    /// `None` when either party hit a protocol or transport error.
    pub outcome: Option<Outcome>,
    /// Both parties saw equal tags.
    pub verified: bool,
    /// Out-of-band check: Bob's corrected payload equals Alice's key.
    pub keys_equal: bool,
    pub rounds: u32,
    pub iterations: usize,
    pub attempts: usize,
    pub leaked_bits: usize,
    pub payload_bits: usize,
    pub efficiency: Option<f64>,
    pub error: Option<String>,
}

impl FrameOutcome {
    pub fn undetected_error(&self) -> bool {
        self.outcome == Some(Outcome::TagMismatch)
    }
}

/// One party's view of a frame after its driver stopped.
#[derive(Debug, Clone, Default)]
struct Side {
    session: Option<ReconSession>,
    error: Option<String>,
}

impl Side {
    fn failed(error: String) -> Self {
        Self {
            session: None,
            error: Some(error),
        }
    }
}

fn assemble(job: &FrameJob, alice: Side, bob: Side) -> FrameOutcome {
    let error = alice
        .error
        .map(|e| format!("alice: {e}"))
        .or(bob.error.map(|e| format!("bob: {e}")));
    let a = alice.session.as_ref();
    let b = bob.session.as_ref();
    let a_out = a.and_then(ReconSession::outcome);
    let b_out = b.and_then(ReconSession::outcome);
    let outcome = if error.is_none() { a_out } else { None };
    FrameOutcome {
        frame_id: job.frame_id,
        outcome,
        verified: a_out == Some(Outcome::Verified) && b_out == Some(Outcome::Verified),
        keys_equal: b.and_then(ReconSession::corrected_payload) == Some(&job.alice_key[..]),
        rounds: a.map_or(0, ReconSession::round),
        iterations: b.map_or(0, ReconSession::iterations),
        attempts: b.map_or(0, ReconSession::attempts),
        leaked_bits: a.map_or(0, ReconSession::leaked_bits),
        payload_bits: job.ctx.payload_bits(),
        efficiency: a
            .and_then(|s| s.efficiency_of(Some(job.qber_true)).ok())
            .map(|r| r.f),
        error,
    }
}

fn new_alice(job: &FrameJob, cfg: &ProtocolConfig) -> Result<ReconSession, ProtocolError> {
    ReconSession::alice(
        job.ctx.clone(),
        job.frame_id,
        job.qber_estimate,
        job.plan,
        *cfg,
        job.private_seed,
    )
}

fn new_bob(job: &FrameJob, cfg: &ProtocolConfig) -> Result<ReconSession, ProtocolError> {
    ReconSession::bob(
        job.ctx.clone(),
        job.frame_id,
        job.qber_estimate,
        job.plan,
        *cfg,
    )
}

#[derive(Debug)]
enum PumpError {
    Protocol(Role, ProtocolError),
    Transport(Role, TransportError),
}

/// Runs one frame in the calling thread, every message passing through an
/// in-process byte stream.
pub fn run_frame_local(job: &FrameJob, cfg: &ProtocolConfig) -> FrameOutcome {
    let (alice, bob) = match (new_alice(job, cfg), new_bob(job, cfg)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return assemble(job, Side::failed(e.to_string()), Side::default())
        }
    };
    let mut alice = Side {
        session: Some(alice),
        error: None,
    };
    let mut bob = Side {
        session: Some(bob),
        error: None,
    };
    let result = pump(
        job,
        alice.session.as_mut().unwrap(),
        bob.session.as_mut().unwrap(),
    );
    match result {
        Ok(()) => {}
        Err(PumpError::Protocol(Role::Alice, e)) => alice.error = Some(e.to_string()),
        Err(PumpError::Protocol(Role::Bob, e)) => bob.error = Some(e.to_string()),
        Err(PumpError::Transport(Role::Alice, e)) => alice.error = Some(e.to_string()),
        Err(PumpError::Transport(Role::Bob, e)) => bob.error = Some(e.to_string()),
    }
    assemble(job, alice, bob)
}

fn pump(job: &FrameJob, alice: &mut ReconSession, bob: &mut ReconSession) -> Result<(), PumpError> {
    use PumpError::{Protocol, Transport as Tr};
    let (a, b) = loopback_pair();
    let (mut ta, mut tb) = (a.into_transport(), b.into_transport());
    let open = alice
        .alice_open(&job.alice_key, job.seed)
        .map_err(|e| Protocol(Role::Alice, e))?;
    ta.send(&open).map_err(|e| Tr(Role::Alice, e))?;
    loop {
        let msg = tb.recv().map_err(|e| Tr(Role::Bob, e))?;
        match bob
            .bob_handle(&job.bob_key, &msg)
            .map_err(|e| Protocol(Role::Bob, e))?
        {
            None => return Ok(()),
            Some(reply) => tb.send(&reply).map_err(|e| Tr(Role::Bob, e))?,
        }
        let msg = ta.recv().map_err(|e| Tr(Role::Alice, e))?;
        match alice
            .alice_handle(&msg)
            .map_err(|e| Protocol(Role::Alice, e))?
        {
            None => return Ok(()),
            Some(reply) => ta.send(&reply).map_err(|e| Tr(Role::Alice, e))?,
        }
    }
}

/// Sequential baseline: every frame through [`run_frame_local`].
pub fn run_sequential(jobs: &[FrameJob], cfg: &ProtocolConfig) -> Vec<FrameOutcome> {
    jobs.iter().map(|job| run_frame_local(job, cfg)).collect()
}

/// Receives the next message for `frame_id`, skipping leftovers of earlier
/// frames. A message for a later frame means the peer lost step.
fn recv_for<T: Transport>(t: &mut T, frame_id: u32) -> Result<ProtocolMessage, TransportError> {
    loop {
        let msg = t.recv()?;
        if msg.frame_id < frame_id {
            continue;
        }
        if msg.frame_id > frame_id {
            return Err(TransportError::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!(
                    "message for frame {} while on frame {frame_id}",
                    msg.frame_id
                ),
            )));
        }
        return Ok(msg);
    }
}

/// Drives one session to completion over `t`. Protocol errors end the frame
/// with a `Fail` to the peer; `Err` is returned only for transport failures,
/// which end the link.
fn drive<T: Transport>(
    mut session: ReconSession,
    key: &[u8],
    first: Result<Option<ProtocolMessage>, ProtocolError>,
    t: &mut T,
) -> Result<Side, (Side, TransportError)> {
    let frame_id = session.frame_id();
    let mut outgoing = first;
    loop {
        match outgoing {
            Ok(None) => {}
            Ok(Some(msg)) => {
                if let Err(te) = t.send(&msg) {
                    let side = Side {
                        session: Some(session),
                        error: Some(te.to_string()),
                    };
                    return Err((side, te));
                }
            }
            Err(e) => {
                let side = Side {
                    session: Some(session),
                    error: Some(e.to_string()),
                };
                return match t.send(&ProtocolMessage::fail(frame_id)) {
                    Ok(()) => Ok(side),
                    Err(te) => Err((side, te)),
                };
            }
        }
        if session.outcome().is_some() {
            return Ok(Side {
                session: Some(session),
                error: None,
            });
        }
        let msg = match recv_for(t, frame_id) {
            Ok(m) => m,
            Err(te) => {
                let side = Side {
                    session: Some(session),
                    error: Some(te.to_string()),
                };
                return Err((side, te));
            }
        };
        outgoing = match session.role() {
            Role::Alice => session.alice_handle(&msg),
            Role::Bob => session.bob_handle(key, &msg),
        };
    }
}

/// Runs `jobs` in order for one role over one transport. After a transport
/// failure the remaining frames are marked failed without touching the link.
fn drive_all<T: Transport>(
    jobs: &[&FrameJob],
    role: Role,
    cfg: &ProtocolConfig,
    t: &mut T,
    on_abort: impl FnOnce(),
) -> Vec<Side> {
    let mut sides = Vec::with_capacity(jobs.len());
    let mut aborted = false;
    let mut iter = jobs.iter();
    for job in iter.by_ref() {
        let created = match role {
            Role::Alice => new_alice(job, cfg),
            Role::Bob => new_bob(job, cfg),
        };
        let result = match created {
            Ok(mut session) => {
                let first = match role {
                    Role::Alice => session.alice_open(&job.alice_key, job.seed).map(Some),
                    Role::Bob => Ok(None),
                };
                let key = match role {
                    Role::Alice => &job.alice_key,
                    Role::Bob => &job.bob_key,
                };
                drive(session, key, first, t)
            }
            Err(e) => {
                let side = Side::failed(e.to_string());
                match t.send(&ProtocolMessage::fail(job.frame_id)) {
                    Ok(()) => Ok(side),
                    Err(te) => Err((side, te)),
                }
            }
        };
        match result {
            Ok(side) => sides.push(side),
            Err((side, _)) => {
                sides.push(side);
                aborted = true;
                break;
            }
        }
    }
    if aborted {
        on_abort();
    }
    for _ in iter {
        sides.push(Side::failed("link closed after transport failure".into()));
    }
    sides
}

/// Driver-side transport: receives from a demultiplexed channel, sends
/// through the party's shared writer.
struct ChannelTransport<'a, W: CloseWrite> {
    rx: Receiver<ProtocolMessage>,
    writer: &'a Mutex<Option<W>>,
}

impl<W: CloseWrite> Transport for ChannelTransport<'_, W> {
    fn send(&mut self, msg: &ProtocolMessage) -> Result<(), TransportError> {
        let mut guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let w = guard.as_mut().ok_or(TransportError::Closed)?;
        if let Err(e) = msg.write_to(w) {
            if let Some(mut w) = guard.take() {
                let _ = w.close_write();
            }
            return Err(e.into());
        }
        Ok(())
    }

    fn recv(&mut self) -> Result<ProtocolMessage, TransportError> {
        self.rx.recv().map_err(|_| TransportError::Closed)
    }
}

fn close<W: CloseWrite>(writer: &Mutex<Option<W>>) {
    let mut guard = writer.lock().unwrap_or_else(|p| p.into_inner());
    if let Some(mut w) = guard.take() {
        let _ = w.close_write();
    }
}

/// One physical party: key holder for frames whose parity is
/// `holder_parity`, decoder for the others. Returns the holder-side and
/// decoder-side results in frame order.
fn run_party<R: Read + Send, W: CloseWrite + Send>(
    jobs: &[&FrameJob],
    holder_parity: u32,
    cfg: &ProtocolConfig,
    reader: R,
    writer: W,
) -> (Vec<Side>, Vec<Side>) {
    let held: Vec<&FrameJob> = jobs
        .iter()
        .copied()
        .filter(|j| j.frame_id % 2 == holder_parity)
        .collect();
    let decoded: Vec<&FrameJob> = jobs
        .iter()
        .copied()
        .filter(|j| j.frame_id % 2 != holder_parity)
        .collect();
    let writer = Mutex::new(Some(writer));
    let (tx_held, rx_held) = channel();
    let (tx_decoded, rx_decoded) = channel();
    thread::scope(|s| {
        s.spawn(move || {
            let mut reader = BufReader::new(reader);
            while let Ok(msg) = ProtocolMessage::read_from(&mut reader) {
                let tx = if msg.frame_id % 2 == holder_parity {
                    &tx_held
                } else {
                    &tx_decoded
                };
                let _ = tx.send(msg);
            }
        });
        let writer = &writer;
        let holder = s.spawn(move || {
            let mut t = ChannelTransport {
                rx: rx_held,
                writer,
            };
            drive_all(&held, Role::Alice, cfg, &mut t, || close(writer))
        });
        let decoder = s.spawn(move || {
            let mut t = ChannelTransport {
                rx: rx_decoded,
                writer,
            };
            drive_all(&decoded, Role::Bob, cfg, &mut t, || close(writer))
        });
        let held = holder.join().expect("holder driver panicked");
        let decoded = decoder.join().expect("decoder driver panicked");
        // lets the peer's reader see end-of-stream
        close(writer);
        (held, decoded)
    })
}

/// Bi-directional reconciliation between two parties joined by a duplex
/// byte stream. Party A holds the key for even frames and decodes odd ones;
/// party B the reverse, so both decode concurrently. Each party demultiplexes
/// incoming messages by frame parity to its two drivers.
pub fn run_bidirectional<RA, WA, RB, WB>(
    jobs: &[FrameJob],
    cfg: &ProtocolConfig,
    party_a: (RA, WA),
    party_b: (RB, WB),
) -> Vec<FrameOutcome>
where
    RA: Read + Send,
    WA: CloseWrite + Send,
    RB: Read + Send,
    WB: CloseWrite + Send,
{
    let mut ordered: Vec<&FrameJob> = jobs.iter().collect();
    ordered.sort_by_key(|j| j.frame_id);
    let ((a_held, a_decoded), (b_held, b_decoded)) = thread::scope(|s| {
        let ordered = &ordered;
        let a = s.spawn(move || run_party(ordered, 0, cfg, party_a.0, party_a.1));
        let b = s.spawn(move || run_party(ordered, 1, cfg, party_b.0, party_b.1));
        (
            a.join().expect("party A panicked"),
            b.join().expect("party B panicked"),
        )
    });
    let (mut a_held, mut a_decoded) = (a_held.into_iter(), a_decoded.into_iter());
    let (mut b_held, mut b_decoded) = (b_held.into_iter(), b_decoded.into_iter());
    let mut by_id: Vec<FrameOutcome> = ordered
        .iter()
        .map(|job| {
            let (alice, bob) = if job.frame_id % 2 == 0 {
                (a_held.next(), b_decoded.next())
            } else {
                (b_held.next(), a_decoded.next())
            };
            assemble(job, alice.unwrap_or_default(), bob.unwrap_or_default())
        })
        .collect();
    // back to the caller's order
    let mut out = Vec::with_capacity(jobs.len());
    for job in jobs {
        let k = by_id
            .iter()
            .position(|o| o.frame_id == job.frame_id)
            .expect("every job has an outcome");
        out.push(by_id.swap_remove(k));
    }
    out
}

/// [`run_bidirectional`] over an in-process duplex pipe.
pub fn run_bidirectional_loopback(jobs: &[FrameJob], cfg: &ProtocolConfig) -> Vec<FrameOutcome> {
    let (a, b) = loopback_pair();
    run_bidirectional(jobs, cfg, a.split(), b.split())
}
