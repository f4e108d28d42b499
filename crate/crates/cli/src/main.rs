use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldpc_recon::code::fixtures::{all_specs, FixtureSpec, BASE_COLS};
use ldpc_recon::code::{girth_of, save_alist};
use ldpc_recon::decoder::{decode, tau_table, DecoderConfig, DecoderPath};
use ldpc_recon::harness::{self, load_code, Mode, SweepConfig};
use ldpc_recon::quant::QuantizerConfig;

/// Quantized LDPC reconciliation benchmarks.
#[derive(Debug, Parser)]
#[command(name = "ldpc-recon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a QBER sweep and emit metrics as CSV.
    Sweep(SweepArgs),
    /// Decode one frame from files and print the result as JSON.
    Decode(DecodeArgs),
    /// Build fixture codes and write them as alist files.
    Codegen(CodegenArgs),
    /// Print the τ table against its floating-point oracle.
    Taucheck(TauArgs),
}

/// Every config key can be overridden by a flag of the same name.
#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON config; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    /// Comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    qber: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long = "target_f", alias = "target-f")]
    target_f: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "msg_max", alias = "msg-max")]
    msg_max: Option<i8>,
    #[arg(long = "e_max", alias = "e-max")]
    e_max: Option<i8>,
    #[arg(long = "max_iter", alias = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long = "d_fraction", alias = "d-fraction")]
    d_fraction: Option<f64>,
    #[arg(long = "reveal_fraction", alias = "reveal-fraction")]
    reveal_fraction: Option<f64>,
    #[arg(long = "max_rounds", alias = "max-rounds")]
    max_rounds: Option<u32>,
    #[arg(long = "qber_estimate", alias = "qber-estimate")]
    qber_estimate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    path: Option<DecoderPath>,
    #[arg(long)]
    mode: Option<Mode>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// Fixture name or alist path.
    #[arg(long)]
    code: String,
    /// Whitespace-separated channel LLRs, one per code bit.
    #[arg(long)]
    llr: PathBuf,
    /// Target syndrome as 0/1 characters; whitespace is ignored.
    #[arg(long)]
    syndrome: PathBuf,
    #[arg(long, default_value = "quantized")]
    path: DecoderPath,
    #[arg(long = "max_iter", alias = "max-iter", default_value_t = ldpc_recon::decoder::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value_t = QuantizerConfig::DEFAULT_STEP)]
    delta: f64,
}

#[derive(Debug, Args)]
struct CodegenArgs {
    /// Fixture names such as `n4096-mb8`.
    names: Vec<String>,
    /// Build every shipped fixture.
    #[arg(long, conflicts_with = "names")]
    all: bool,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct TauArgs {
    #[arg(long, default_value_t = QuantizerConfig::DEFAULT_STEP)]
    delta: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Decode(args) => decode_cmd(args),
        Command::Codegen(args) => codegen(args),
        Command::Taucheck(args) => taucheck(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn sweep_config(args: SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::from_file(path).map_err(runtime)?,
        None => SweepConfig::default(),
    };
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field { cfg.$field = v; })*
        };
    }
    apply!(
        code,
        qber,
        frames,
        target_f,
        delta,
        msg_max,
        e_max,
        max_iter,
        d_fraction,
        reveal_fraction,
        max_rounds,
        seed,
        workers,
        path,
        mode
    );
    if args.qber_estimate.is_some() {
        cfg.qber_estimate = args.qber_estimate;
    }
    if args.output.is_some() {
        cfg.output = args.output;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let cfg = sweep_config(args)?;
    let results = harness::run_sweep(&cfg).map_err(runtime)?;
    for r in &results {
        eprintln!(
            "qber {} on {} (p = {}, s = {}): fer {} f {}",
            r.row.qber, r.code, r.plan.p, r.plan.s, r.row.fer, r.row.avg_efficiency
        );
    }
    if cfg.output.is_none() {
        harness::write_metrics(&harness::rows(&results), std::io::stdout().lock())
            .map_err(runtime)?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn decode_cmd(args: DecodeArgs) -> Result<(), Failure> {
    let code = load_code(&args.code).map_err(runtime)?;
    let llrs = read_text(&args.llr)?
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|e| {
                Failure::Runtime(format!("{}: bad LLR {t:?}: {e}", args.llr.display()))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let syndrome = read_text(&args.syndrome)?
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(Failure::Runtime(format!(
                "{}: syndrome bits must be 0 or 1, found {c:?}",
                args.syndrome.display()
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = DecoderConfig {
        path: args.path,
        max_iter: args.max_iter,
        quant: QuantizerConfig::with_step(args.delta).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    let result = decode(&code, &llrs, &syndrome, cfg).map_err(runtime)?;
    println!("{}", serde_json::to_string(&result).map_err(runtime)?);
    Ok(())
}

fn codegen(args: CodegenArgs) -> Result<(), Failure> {
    let specs: Vec<FixtureSpec> = if args.all {
        all_specs()
    } else if args.names.is_empty() {
        return Err(Failure::Usage(
            "name at least one fixture or pass --all".into(),
        ));
    } else {
        let known = all_specs();
        args.names
            .iter()
            .map(|name| {
                known
                    .iter()
                    .find(|s| &s.name == name)
                    .cloned()
                    .ok_or_else(|| Failure::Usage(format!("unknown fixture {name:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", args.out_dir.display())))?;
    for spec in specs {
        let (_, code) = spec.build().map_err(runtime)?;
        let path = args.out_dir.join(format!("{}.alist", spec.name));
        std::fs::write(&path, save_alist(&code))
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        eprintln!(
            "{}: {}x{} ({} base columns, Z = {}), rate {:.4}, girth {}",
            path.display(),
            code.m(),
            code.n(),
            BASE_COLS,
            spec.z,
            code.rate(),
            girth_of(&code)
        );
    }
    Ok(())
}

fn taucheck(args: TauArgs) -> Result<(), Failure> {
    let cfg = QuantizerConfig::with_step(args.delta).map_err(|e| Failure::Usage(e.to_string()))?;
    let table = tau_table(&cfg);
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    let mut emit = || -> std::io::Result<()> {
        writeln!(out, "p,q,tau,oracle,deviation")?;
        for e in &table {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.p, e.q, e.tau, e.oracle, e.deviation
            )?;
        }
        out.flush()
    };
    emit().map_err(runtime)?;
    let max_dev = table
        .iter()
        .map(|e| e.deviation.unsigned_abs())
        .max()
        .unwrap_or(0);
    eprintln!("{} entries, max deviation {max_dev}", table.len());
    Ok(())
}
