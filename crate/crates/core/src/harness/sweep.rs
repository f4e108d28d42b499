//! QBER sweeps over the full protocol.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Mode, SweepConfig};
use super::keys::generate_key_pair;
use super::metrics::{write_metrics_file, MetricsRow};
use super::HarnessError;
use crate::code::fixtures::{
    all_specs, family_specs, load_code_file, load_fixture, FAMILY_LENGTHS,
};
use crate::code::ParityCheckCode;
use crate::protocol::{
    mix64, run_bidirectional_loopback, run_frame_local, select_code, CodeContext, FrameJob,
    FrameOutcome, ProtocolConfig, SessionPlan,
};

/// The codes a sweep may choose from, with display names.
#[derive(Debug, Clone)]
pub struct CodeSet {
    pub names: Vec<String>,
    pub contexts: Vec<Arc<CodeContext>>,
}

/// Resolves a family name (`n4096`), fixture name (`n4096-mb8`) or alist
/// path.
pub fn resolve_codes(spec: &str, proto: &ProtocolConfig) -> Result<CodeSet, HarnessError> {
    let family_len = spec
        .strip_prefix('n')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| FAMILY_LENGTHS.contains(n));
    let loaded: Vec<(String, ParityCheckCode)> = if let Some(n) = family_len {
        family_specs(n)
            .into_iter()
            .map(|s| Ok((s.name.clone(), load_code_file(&s.path())?)))
            .collect::<Result<_, HarnessError>>()?
    } else {
        vec![(spec.to_string(), load_code(spec)?)]
    };
    let mut set = CodeSet {
        names: Vec::new(),
        contexts: Vec::new(),
    };
    for (name, code) in loaded {
        set.contexts
            .push(Arc::new(CodeContext::with_config(Arc::new(code), proto)?));
        set.names.push(name);
    }
    Ok(set)
}

/// One code by fixture name or alist path.
pub fn load_code(spec: &str) -> Result<ParityCheckCode, HarnessError> {
    if all_specs().iter().any(|s| s.name == spec) {
        Ok(load_fixture(spec)?)
    } else {
        Ok(load_code_file(std::path::Path::new(spec))?)
    }
}

/// Per-frame seed: the master seed hashed with the QBER point and the frame
/// index, so results do not depend on scheduling.
pub fn frame_seed(master: u64, qber: f64, frame_id: u32) -> u64 {
    mix64(mix64(master ^ qber.to_bits()) ^ u64::from(frame_id))
}

/// Builds the jobs of one QBER point on an already chosen code.
pub fn build_jobs(
    ctx: &Arc<CodeContext>,
    plan: SessionPlan,
    qber_true: f64,
    qber_estimate: f64,
    frames: usize,
    master_seed: u64,
) -> Result<Vec<FrameJob>, HarnessError> {
    (0..frames as u32)
        .into_par_iter()
        .map(|frame_id| {
            let fs = frame_seed(master_seed, qber_true, frame_id);
            let keys = generate_key_pair(ctx.payload_bits(), qber_true, mix64(fs ^ 1))?;
            Ok(FrameJob {
                frame_id,
                ctx: ctx.clone(),
                plan,
                qber_estimate,
                qber_true,
                alice_key: keys.alice,
                bob_key: keys.bob,
                seed: mix64(fs ^ 2),
                private_seed: mix64(fs ^ 3),
            })
        })
        .collect()
}

/// Runs prepared jobs; the caller's pool decides the parallelism.
pub fn execute(jobs: &[FrameJob], proto: &ProtocolConfig, mode: Mode) -> Vec<FrameOutcome> {
    match mode {
        Mode::Uni => jobs.par_iter().map(|j| run_frame_local(j, proto)).collect(),
        Mode::Bidirectional => {
            // each batch keeps two decoders busy
            let batches = (rayon::current_num_threads() / 2).max(1);
            let chunk = jobs.len().div_ceil(batches).max(1);
            jobs.par_chunks(chunk)
                .flat_map_iter(|c| run_bidirectional_loopback(c, proto))
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub row: MetricsRow,
    /// Name of the code chosen for this point.
    pub code: String,
    pub plan: SessionPlan,
    pub outcomes: Vec<FrameOutcome>,
}

impl PointResult {
    /// Verified frames whose keys differ; must be zero.
    pub fn undetected_errors(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.verified && !o.keys_equal)
            .count()
    }
}

/// One QBER point. Timing covers protocol, decoding and transport only.
pub fn run_point(
    codes: &CodeSet,
    cfg: &SweepConfig,
    qber: f64,
) -> Result<PointResult, HarnessError> {
    let proto = cfg.protocol()?;
    let estimate = cfg.qber_estimate.unwrap_or(qber);
    let (idx, plan) = select_code(&codes.contexts, estimate, cfg.target_f)?;
    let ctx = &codes.contexts[idx];
    let jobs = build_jobs(ctx, plan, qber, estimate, cfg.frames, cfg.seed)?;
    let start = Instant::now();
    let outcomes = execute(&jobs, &proto, cfg.mode);
    let wall = start.elapsed().as_secs_f64();
    Ok(PointResult {
        row: MetricsRow::from_outcomes(qber, &outcomes, wall),
        code: codes.names[idx].clone(),
        plan,
        outcomes,
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?)
}

/// Full sweep: every QBER point, then the CSV if an output is configured.
/// With `frames = 0` no rows are produced.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<PointResult>, HarnessError> {
    cfg.validate()?;
    let codes = resolve_codes(&cfg.code, &cfg.protocol()?)?;
    run_sweep_with(&codes, cfg)
}

/// [`run_sweep`] on codes that are already loaded.
pub fn run_sweep_with(
    codes: &CodeSet,
    cfg: &SweepConfig,
) -> Result<Vec<PointResult>, HarnessError> {
    cfg.validate()?;
    let results = if cfg.frames == 0 {
        Vec::new()
    } else {
        let pool = pool(cfg.workers)?;
        pool.install(|| {
            cfg.qber
                .iter()
                .map(|&q| run_point(codes, cfg, q))
                .collect::<Result<Vec<_>, _>>()
        })?
    };
    if let Some(path) = &cfg.output {
        write_metrics_file(&rows(&results), path)?;
    }
    Ok(results)
}

pub fn rows(results: &[PointResult]) -> Vec<MetricsRow> {
    results.iter().map(|r| r.row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::read_metrics;

    /// The n=1024 family built in memory, so tests do not depend on files.
    fn family(cfg: &SweepConfig) -> CodeSet {
        let proto = cfg.protocol().unwrap();
        let mut set = CodeSet {
            names: Vec::new(),
            contexts: Vec::new(),
        };
        for spec in family_specs(1024) {
            let (_, code) = spec.build().unwrap();
            set.contexts.push(Arc::new(
                CodeContext::with_config(Arc::new(code), &proto).unwrap(),
            ));
            set.names.push(spec.name);
        }
        set
    }

    fn small() -> SweepConfig {
        SweepConfig {
            code: "n1024".into(),
            qber: vec![0.03],
            frames: 24,
            workers: 1,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn zero_frames_give_no_rows() {
        let path =
            std::env::temp_dir().join(format!("ldpc-recon-empty-{}.csv", std::process::id()));
        let cfg = SweepConfig {
            frames: 0,
            output: Some(path.clone()),
            ..small()
        };
        let results = run_sweep_with(&family(&cfg), &cfg).unwrap();
        assert!(results.is_empty());
        let back = read_metrics(std::fs::File::open(&path).unwrap()).unwrap();
        assert!(back.is_empty());
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = small();
        let codes = family(&cfg);
        let one = run_sweep_with(&codes, &cfg).unwrap();
        let three = run_sweep_with(
            &codes,
            &SweepConfig {
                workers: 3,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_eq!(one[0].outcomes, three[0].outcomes);
        assert_eq!(one[0].row.fer, three[0].row.fer);
        assert!(one[0].row.avg_efficiency == three[0].row.avg_efficiency);
    }

    #[test]
    fn bidirectional_matches_unidirectional() {
        let cfg = small();
        let codes = family(&cfg);
        let uni = run_sweep_with(&codes, &cfg).unwrap();
        let bi = run_sweep_with(
            &codes,
            &SweepConfig {
                mode: Mode::Bidirectional,
                workers: 2,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(uni[0].outcomes, bi[0].outcomes);
        assert_eq!(uni[0].undetected_errors(), 0);
    }

    #[test]
    fn fer_grows_with_the_channel_on_a_fixed_code() {
        // one plan for both points: only the channel differs
        let cfg = SweepConfig {
            qber: vec![0.01, 0.08],
            qber_estimate: Some(0.04),
            frames: 60,
            ..small()
        };
        let results = run_sweep_with(&family(&cfg), &cfg).unwrap();
        assert_eq!(results[0].code, results[1].code);
        assert!(
            results[0].row.fer <= results[1].row.fer,
            "{:?}",
            rows(&results)
        );
        assert!(results[1].row.fer > 0.5);
    }

    #[test]
    fn csv_is_written_and_reads_back() {
        let path =
            std::env::temp_dir().join(format!("ldpc-recon-sweep-{}.csv", std::process::id()));
        let cfg = SweepConfig {
            qber: vec![0.02, 0.05],
            frames: 8,
            output: Some(path.clone()),
            ..small()
        };
        let results = run_sweep_with(&family(&cfg), &cfg).unwrap();
        let back = read_metrics(std::fs::File::open(&path).unwrap()).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows(&results).iter().zip(&back) {
            assert!(a.same_as(b));
            assert!((0.0..=1.0).contains(&a.fer) && a.throughput_mbps >= 0.0);
        }
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn missing_code_file_is_reported() {
        let err = resolve_codes("/nonexistent/code.alist", &ProtocolConfig::default()).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/code.alist"));
    }

    #[test]
    fn frame_seeds_differ_by_point_and_frame() {
        assert_ne!(frame_seed(1, 0.01, 0), frame_seed(1, 0.02, 0));
        assert_ne!(frame_seed(1, 0.01, 0), frame_seed(1, 0.01, 1));
        assert_ne!(frame_seed(1, 0.01, 0), frame_seed(2, 0.01, 0));
    }
}
