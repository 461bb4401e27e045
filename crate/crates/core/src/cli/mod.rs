//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 not found / not AME /
//! verification failed, 3 blocked by the composite gate, 4 instance too large
//! for the state-vector oracle.

/// Like `print!`, but a closed stdout does not abort the command.
macro_rules! out {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

macro_rules! outln {
    () => { emit("\n") };
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

mod manifest;
mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::crt::{
    certify_composite, compose_matrices, search_composite, split_matrix, CompositePhase,
    GateDecision, GateTable,
};
use crate::field::FieldSpec;
use crate::oracle::{duality_report, OracleError, DEFAULT_CAP};
use crate::phasecore::{certify_ame, format, CertificationReport, PhaseMatrix};
use crate::search::{Checkpoint, Search, SearchConfig, Termination, TraceRecord};

pub use self::manifest::{digest, RunManifest};
pub use self::report::{entropy_table, failure_summary, fmt_bits, saturation_table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_GATE_BLOCKED: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;

/// Default worker count when `--threads` is absent.
pub const THREADS_ENV: &str = "AME_PHASE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ame-phase",
    version,
    about = "Search and certify AME quadratic phase states"
)]
pub struct Cli {
    /// Worker threads (default: $AME_PHASE_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Parallel-tempering search for an AME phase matrix.
    Search(SearchArgs),
    /// Certify a matrix file by cut ranks.
    Certify(CertifyArgs),
    /// Compose or split composite-dimension matrices.
    #[command(subcommand)]
    Crt(CrtCommand),
    /// Check the rank prediction against the explicit state vector.
    Verify(VerifyArgs),
    /// Check a composite dimension against known nonexistence results.
    Gate(GateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    /// Number of parties.
    #[arg(long)]
    pub n: Option<usize>,
    /// prime:P | primepower:P:M[:c0,..,cM] | composite:P1,P2,..
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0.2)]
    pub tmin: f64,
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 5000)]
    pub stall: u64,
    #[arg(long, default_value_t = 50)]
    pub exchange_interval: u64,
    #[arg(long, default_value_t = 0.05)]
    pub guide: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restart cap per replica (default unlimited).
    #[arg(long)]
    pub max_restarts: Option<u64>,
    /// Derive the temperature range from sampled cost changes.
    #[arg(long)]
    pub auto_ladder: bool,
    #[arg(long, default_value_t = 10_000)]
    pub coherence_interval: u64,
    /// Matrix output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Line-delimited trace output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub trace_interval: u64,
    /// Certification records of the best matrix, line-delimited.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Checkpoint file, rewritten every `--checkpoint-interval` steps.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub checkpoint_interval: u64,
    /// Continue from a checkpoint; its configuration replaces the flags.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Re-run the search recorded in a manifest (a matrix file written by
    /// `search`, or the bare manifest JSON); its configuration replaces the flags.
    #[arg(long, conflicts_with = "resume")]
    pub replay: Option<PathBuf>,
    /// Search composite dimensions even if the gate blocks them.
    #[arg(long)]
    pub force_gate_off: bool,
    /// Extra nonexistence entries (JSON array).
    #[arg(long)]
    pub gate_table: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    pub file: PathBuf,
    /// Line-delimited machine-readable report.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum CrtCommand {
    /// Combine prime-field matrices into one over Z_d.
    Compose {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a Z_d matrix modulo each prime.
    Split {
        file: PathBuf,
        /// Output prefix; components go to `<prefix>_p<prime>.txt`.
        #[arg(long)]
        prefix: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Largest state vector to build, in amplitudes.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GateArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated primes, or a composite field spec.
    #[arg(long)]
    pub primes: String,
    #[arg(long)]
    pub gate_table: Option<PathBuf>,
}

/// A message and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Writes to stdout, ignoring failures such as a reader that has gone away;
/// the exit code still reports the outcome.
fn emit(text: &str) {
    let mut o = std::io::stdout().lock();
    let _ = o.write_all(text.as_bytes()).and_then(|_| o.flush());
}

fn threads(flag: Option<usize>) -> std::result::Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::input(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

pub fn execute(cli: Cli) -> Outcome {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads(cli.threads)? {
        if t == 0 {
            return Err(Failure::input("thread count must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(Failure::input)?;
    pool.install(|| match cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Crt(c) => cmd_crt(c),
        Command::Verify(a) => cmd_verify(a),
        Command::Gate(a) => cmd_gate(a),
    })
}

fn read_matrix(path: &Path) -> std::result::Result<PhaseMatrix, Failure> {
    format::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_matrix(
    path: Option<&Path>,
    p: &PhaseMatrix,
    manifest: &RunManifest,
) -> std::result::Result<(), Failure> {
    let text = format::render(p, Some(&manifest.to_line()));
    match path {
        Some(path) => write_text(path, &text),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn gate_table(path: Option<&Path>) -> std::result::Result<GateTable, Failure> {
    match path {
        Some(p) => GateTable::with_file(p).map_err(Failure::input),
        None => Ok(GateTable::builtin()),
    }
}

fn config_from(a: &SearchArgs) -> std::result::Result<SearchConfig, Failure> {
    let n = a.n.ok_or_else(|| Failure::input("--n is required"))?;
    let spec: FieldSpec = a
        .field
        .as_deref()
        .ok_or_else(|| Failure::input("--field is required"))?
        .parse()
        .map_err(Failure::input)?;
    Ok(SearchConfig {
        n_parties: n,
        field: spec,
        replicas: a.replicas,
        t_min: a.tmin,
        t_max: a.tmax,
        max_steps: a.steps,
        stall_limit: a.stall,
        exchange_interval: a.exchange_interval,
        guide_probability: a.guide,
        rng_seed: a.seed,
        max_restarts: a.max_restarts,
        coherence_interval: a.coherence_interval,
        trace_interval: if a.trace.is_some() {
            a.trace_interval
        } else {
            0
        },
        auto_ladder: a.auto_ladder,
    })
}

fn cmd_search(a: SearchArgs) -> Outcome {
    let started = Instant::now();
    if let Some(path) = &a.resume {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let cp: Checkpoint = serde_json::from_str(&text).map_err(Failure::input)?;
        let search = Search::resume(cp).map_err(Failure::input)?;
        return drive_search(&a, search, started);
    }
    let mut cfg = match &a.replay {
        Some(path) => replay_config(path)?,
        None => config_from(&a)?,
    };
    if let FieldSpec::Composite { primes } = cfg.field.clone() {
        return composite_search(&a, cfg, &primes, started);
    }
    if a.trace.is_none() {
        cfg.trace_interval = 0;
    }
    let search = Search::new(cfg).map_err(Failure::input)?;
    drive_search(&a, search, started)
}

fn replay_config(path: &Path) -> std::result::Result<SearchConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let line = match format::parse_with_manifest(&text) {
        Ok((_, Some(line))) => line,
        Ok((_, None)) => return Err(Failure::input(format!("{}: no manifest", path.display()))),
        Err(_) => text,
    };
    let m: RunManifest = serde_json::from_str(line.trim())
        .map_err(|e| Failure::input(format!("{}: bad manifest: {e}", path.display())))?;
    if m.command != "search" {
        return Err(Failure::input(format!(
            "{}: manifest records `{}`, not a search",
            path.display(),
            m.command
        )));
    }
    serde_json::from_value(m.config).map_err(Failure::input)
}

fn drive_search(a: &SearchArgs, mut search: Search, started: Instant) -> Outcome {
    let mut trace_out = match &a.trace {
        Some(p) => {
            Some(BufWriter::new(File::create(p).map_err(|e| {
                Failure::input(format!("{}: {e}", p.display()))
            })?))
        }
        None => None,
    };
    let mut io_error = None;
    let mut sink = |t: &TraceRecord| {
        if let Some(w) = trace_out.as_mut() {
            let line = serde_json::to_string(t).expect("trace serialises");
            if let Err(e) = writeln!(w, "{line}") {
                io_error.get_or_insert(e);
            }
        }
    };
    let interval = a.checkpoint_interval.max(1);
    while !search.is_finished() {
        let limit = match &a.checkpoint {
            Some(_) => search.step().saturating_add(interval),
            None => u64::MAX,
        };
        search.run_until(limit, &mut sink).map_err(Failure::input)?;
        if let Some(path) = &a.checkpoint {
            let json = serde_json::to_string(&search.checkpoint()).expect("checkpoint serialises");
            write_text(path, &json)?;
        }
    }
    if let Some(w) = trace_out.as_mut() {
        w.flush().map_err(Failure::input)?;
    }
    if let Some(e) = io_error {
        return Err(Failure::input(e));
    }

    let result = search.result().map_err(Failure::input)?;
    let cfg = search.config();
    let body = format::body(&result.best);
    let mut m = RunManifest::new(
        "search",
        serde_json::to_value(cfg).expect("config serialises"),
        &body,
    );
    m.field = Some(cfg.field.clone());
    m.rng_seed = Some(cfg.rng_seed);
    m.elapsed_ms = started.elapsed().as_millis();
    m.result = Some(json!({
        "best_cost": result.best_cost,
        "steps_taken": result.steps_taken,
        "restarts_used": result.restarts_used,
        "terminated_by": result.terminated_by,
        "temperatures": result.temperatures,
    }));
    if let Some(path) = &a.records {
        write_text(path, &report::to_jsonl(&report::records(&result.report)))?;
    }
    if a.out.is_some() {
        write_matrix(a.out.as_deref(), &result.best, &m)?;
    }

    outln!(
        "search N={} field={} seed={}: {:?} after {} steps, best cost {}, restarts {}",
        cfg.n_parties,
        cfg.field,
        cfg.rng_seed,
        result.terminated_by,
        result.steps_taken,
        result.best_cost,
        result.restarts_used
    );
    outln!("digest {}", m.digest);
    if a.out.is_none() {
        out!("{}", format::render(&result.best, Some(&m.to_line())));
    }
    match result.terminated_by {
        Termination::CostZero => {
            outln!(
                "AME certificate: k-uniformity {}, code distance {}",
                result.report.k_uniformity,
                result.report.code_distance
            );
            Ok(EXIT_OK)
        }
        Termination::StepBudget => {
            outln!("not found; best is {}-uniform", result.report.k_uniformity);
            outln!("{}", failure_summary(&result.report));
            Ok(EXIT_NOT_FOUND)
        }
    }
}

fn composite_search(
    a: &SearchArgs,
    cfg: SearchConfig,
    primes: &[u64],
    started: Instant,
) -> Outcome {
    let n = cfg.n_parties;
    let decision = gate_table(a.gate_table.as_deref())?.check(n, primes);
    if let GateDecision::Blocked {
        prime,
        reason,
        citation,
    } = &decision
    {
        if !a.force_gate_off {
            outln!("gate blocked at p={prime}: {reason} ({citation})");
            return Ok(EXIT_GATE_BLOCKED);
        }
        outln!("gate would block at p={prime}: {reason}; searching anyway");
    }
    if a.checkpoint.is_some() {
        return Err(Failure::input(
            "checkpointing is only supported for single-field searches",
        ));
    }
    let result = search_composite(n, primes, &cfg).map_err(Failure::input)?;
    let body = format::body(&result.composite);
    let mut m = RunManifest::new(
        "search",
        serde_json::to_value(&cfg).expect("config serialises"),
        &body,
    );
    m.field = Some(cfg.field.clone());
    m.rng_seed = Some(cfg.rng_seed);
    m.elapsed_ms = started.elapsed().as_millis();
    m.result = Some(json!({
        "best_cost": result.best_cost,
        "terminated_by": result.terminated_by,
        "components": result.components.iter().map(|c| json!({
            "prime": c.best.field().order(),
            "best_cost": c.best_cost,
            "steps_taken": c.steps_taken,
            "terminated_by": c.terminated_by,
        })).collect::<Vec<_>>(),
        "gate": decision,
    }));
    if let Some(path) = &a.records {
        write_text(path, &report::to_jsonl(&report::records(&result.report)))?;
    }
    if a.out.is_some() {
        write_matrix(a.out.as_deref(), &result.composite, &m)?;
    }
    for c in &result.components {
        outln!(
            "component p={}: {:?} after {} steps, best cost {}",
            c.best.field().order(),
            c.terminated_by,
            c.steps_taken,
            c.best_cost
        );
    }
    outln!("digest {}", m.digest);
    if a.out.is_none() {
        out!("{}", format::render(&result.composite, Some(&m.to_line())));
    }
    if result.report.is_ame {
        outln!(
            "AME certificate: code distance {}",
            result.report.code_distance
        );
        Ok(EXIT_OK)
    } else {
        outln!(
            "not found; best composite cost {}, {}-uniform",
            result.best_cost,
            result.report.k_uniformity
        );
        outln!("{}", failure_summary(&result.report));
        Ok(EXIT_NOT_FOUND)
    }
}

/// Certification of a single-field or composite matrix.
pub fn certify_matrix(p: &PhaseMatrix) -> std::result::Result<CertificationReport, Failure> {
    match p.field().spec() {
        FieldSpec::Composite { .. } => {
            let c = CompositePhase::from_matrix(p).map_err(Failure::input)?;
            certify_composite(&c).map_err(Failure::input)
        }
        _ => certify_ame(p).map_err(Failure::input),
    }
}

fn cmd_certify(a: CertifyArgs) -> Outcome {
    let started = Instant::now();
    let p = read_matrix(&a.file)?;
    let r = certify_matrix(&p)?;
    let records = report::records(&r);
    let body = report::to_jsonl(&records);
    let mut m = RunManifest::new(
        "certify",
        serde_json::to_value(&a).expect("args serialise"),
        &body,
    );
    m.field = Some(p.field().spec().clone());
    m.elapsed_ms = started.elapsed().as_millis();
    outln!(
        "N={} field={} local dimension {}",
        p.n(),
        p.field().spec(),
        r.local_dim()
    );
    out!("{}", entropy_table(&r));
    outln!();
    out!("{}", saturation_table(&r));
    outln!("digest {}", m.digest);
    if let Some(path) = &a.records {
        let line = json!({"record": "manifest", "manifest": m});
        write_text(path, &format!("{body}{line}\n"))?;
    }
    Ok(if r.is_ame { EXIT_OK } else { EXIT_NOT_FOUND })
}

fn cmd_crt(c: CrtCommand) -> Outcome {
    let config = serde_json::to_value(&c).expect("args serialise");
    match c {
        CrtCommand::Compose { files, out } => {
            let comps = files
                .iter()
                .map(|f| read_matrix(f))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let p = compose_matrices(&comps).map_err(Failure::input)?;
            let mut m = RunManifest::new("crt compose", config, &format::body(&p));
            m.field = Some(p.field().spec().clone());
            write_matrix(out.as_deref(), &p, &m)?;
            if out.is_some() {
                outln!("digest {}", m.digest);
            }
            Ok(EXIT_OK)
        }
        CrtCommand::Split { file, prefix } => {
            let p = read_matrix(&file)?;
            let parts = split_matrix(&p).map_err(Failure::input)?;
            let prefix = prefix.unwrap_or_else(|| file.with_extension(""));
            for part in &parts {
                let q = part.field().order();
                let path = PathBuf::from(format!("{}_p{q}.txt", prefix.display()));
                let mut m = RunManifest::new("crt split", config.clone(), &format::body(part));
                m.field = Some(part.field().spec().clone());
                write_matrix(Some(&path), part, &m)?;
                outln!("{} {}", path.display(), m.digest);
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let p = read_matrix(&a.file)?;
    let report = match duality_report(&p, a.tol, a.cap) {
        Ok(r) => r,
        Err(e @ OracleError::InstanceTooLarge { .. }) => {
            let OracleError::InstanceTooLarge { q, n, cap } = e else {
                unreachable!()
            };
            let need = e
                .required_cap()
                .map_or_else(|| "beyond 2^64".to_string(), |c| format!("--cap {c}"));
            outln!(
                "instance too large: the state vector needs {q}^{n} amplitudes, above the cap of {cap} \
                 (required: {need}); explicit verification is infeasible, certify by rank instead"
            );
            return Ok(EXIT_TOO_LARGE);
        }
        Err(e) => return Err(Failure::input(e)),
    };
    outln!(
        "N={} local dimension {}: {} bipartitions checked, tolerance {:e}",
        report.n,
        report.local_dim,
        report.cuts.len(),
        report.tolerance
    );
    outln!("norm residual          {:.3e}", report.norm_residual);
    outln!(
        "max purity residual    {:.3e}",
        report.max_purity_residual()
    );
    outln!(
        "max flatness residual  {:.3e}",
        report.max_flatness_residual()
    );
    match report.max_identity_residual() {
        Some(x) => outln!("max identity residual  {x:.3e}"),
        None => outln!("max identity residual  n/a (not AME)"),
    }
    if let Some(x) = report.max_eigen_residual() {
        outln!("max eigenvalue residual {x:.3e}");
    }
    if report.passed() {
        outln!("verified");
        Ok(EXIT_OK)
    } else {
        outln!("FAILED at {} bipartitions", report.failures());
        Ok(EXIT_NOT_FOUND)
    }
}

fn cmd_gate(a: GateArgs) -> Outcome {
    let primes: Vec<u64> = match a.primes.parse::<FieldSpec>() {
        Ok(FieldSpec::Composite { primes }) => primes,
        Ok(FieldSpec::Prime { p }) => vec![p],
        Ok(other) => return Err(Failure::input(format!("{other} is not square-free"))),
        Err(_) => a
            .primes
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(Failure::input))
            .collect::<std::result::Result<_, _>>()?,
    };
    let spec = FieldSpec::composite(&primes).map_err(Failure::input)?;
    match gate_table(a.gate_table.as_deref())?.check(a.n, &primes) {
        GateDecision::Pass => {
            outln!("pass: no known obstruction for N={} over {spec}", a.n);
            Ok(EXIT_OK)
        }
        GateDecision::Blocked {
            prime,
            reason,
            citation,
        } => {
            outln!("blocked at p={prime}: {reason} ({citation})");
            Ok(EXIT_GATE_BLOCKED)
        }
    }
}
