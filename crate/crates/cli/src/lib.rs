//! Command-line front end: `list`, `cycle`, `verify`, `bench`, `table1`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use quasigray::bounds::{check_bounds, Outcome};
use quasigray::catalog::{ConfigError, CounterConfig, RawParams, BRGC_GOLDEN, SCHEMAS};
use quasigray::composite::LayerKind;
use quasigray::export::{table1_configs, table_row, write_csv, write_json, write_table_csv, ExportError, ReportDoc};
use quasigray::harness::{
    collect_metrics, enumerate_cycle, enumerate_cycle_observed, verify_quasi_gray, DEFAULT_CYCLE_CAP,
};

pub const CAP_ENV: &str = "QUASIGRAY_CYCLE_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quasigray", version, about = "Gray and quasi-Gray code counters under bit-probe accounting")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Print available counters and their parameters.
    List,
    /// Enumerate one counter's cycle and report its metrics.
    Cycle(RunArgs),
    /// Check a counter against its claimed write bound and cost bounds.
    Verify(RunArgs),
    /// Sweep a parameter grid; list parameters accept `2,4,8` or `2..=10`.
    Bench(RunArgs),
    /// Reproduce the summary table at small dimensions.
    Table1(OutArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    None,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutArgs {
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum steps per enumeration.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    counter: String,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    g: Option<String>,
    /// Layer dimensions, innermost first.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    #[arg(long)]
    inner: Option<String>,
    /// Sub-code for the wine counter's pointer and phase fields.
    #[arg(long)]
    sub: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug)]
struct UsageError(String);

impl From<ConfigError> for UsageError {
    fn from(e: ConfigError) -> Self {
        UsageError(e.to_string())
    }
}

/// Parses `3`, `2,4,8`, `2..=5`, or `2..6` (and mixtures) into a sorted list.
fn parse_list(name: &str, s: &str) -> Result<Vec<usize>, UsageError> {
    let bad = || UsageError(format!("invalid value for --{name}: {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..=") {
            let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            out.extend(a..=b);
        } else if let Some((a, b)) = part.split_once("..") {
            let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() || out.len() > 10_000 {
        return Err(bad());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_kind(name: &str, s: &Option<String>) -> Result<Option<LayerKind>, UsageError> {
    s.as_deref()
        .map(|v| v.parse::<LayerKind>().map_err(|_| UsageError(format!("invalid value for --{name}: {v:?}"))))
        .transpose()
}

impl RunArgs {
    /// Every configuration named by the arguments, in key order.
    fn configs(&self) -> Result<Vec<CounterConfig>, UsageError> {
        let list = |name: &str, v: &Option<String>| v.as_deref().map(|s| parse_list(name, s)).transpose();
        let dims = list("dim", &self.dim)?;
        let ns = list("n", &self.n)?;
        let gs = list("g", &self.g)?;
        let inner = parse_kind("inner", &self.inner)?;
        let sub = parse_kind("sub", &self.sub)?;
        let one = |v: &Option<Vec<usize>>| v.clone().map(|v| v.into_iter().map(Some).collect()).unwrap_or(vec![None]);

        let mut out = Vec::new();
        for dim in one(&dims) {
            for n in one(&ns) {
                for g in one(&gs) {
                    let raw = RawParams { dim, n, g, layers: self.layers.clone(), inner, sub };
                    out.push(CounterConfig::from_raw(&self.counter, &raw)?);
                }
            }
        }
        out.sort_by(|a, b| a.key().cmp(&b.key()));
        out.dedup();
        Ok(out)
    }

    fn single(&self) -> Result<CounterConfig, UsageError> {
        let mut v = self.configs()?;
        if v.len() != 1 {
            return Err(UsageError("this verb takes a single configuration; use bench for sweeps".into()));
        }
        Ok(v.remove(0))
    }
}

fn resolve_cap(flag: Option<u64>) -> Result<u64, UsageError> {
    let cap = match flag {
        Some(c) => c,
        None => match std::env::var(CAP_ENV) {
            Ok(v) => {
                v.trim().parse().map_err(|_| UsageError(format!("{CAP_ENV} must be a positive integer, got {v:?}")))?
            }
            Err(_) => DEFAULT_CYCLE_CAP,
        },
    };
    if cap == 0 {
        return Err(UsageError("cycle cap must be at least 1".into()));
    }
    Ok(cap)
}

fn open_out(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

enum Failure {
    Usage(String),
    Check(String),
    Internal(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Config(c) => Failure::Usage(c.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn cmd_list(w: &mut dyn Write) -> Result<(), Failure> {
    for (name, schema) in SCHEMAS {
        writeln!(w, "{name:<11} {schema}")?;
    }
    Ok(())
}

fn cmd_cycle(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.single()?;
    let cap = resolve_cap(args.out.cap)?;
    let counter = cfg.build().map_err(UsageError::from)?;
    let report = enumerate_cycle(counter.as_ref(), cap).map_err(internal)?;
    let mut w = open_out(&args.out.out)?;
    match args.out.emit.unwrap_or(Emit::None) {
        Emit::Json => write_json(&mut w, &ReportDoc::new(&report, vec![]))?,
        Emit::Csv => write_csv(&mut w, &[collect_metrics(&report)])?,
        Emit::None => {
            let m = collect_metrics(&report);
            writeln!(
                w,
                "{cfg}: length {} closed {} distinct {} efficiency {} avg_reads {} worst_reads {} avg_writes {} worst_writes {} max_hamming {}",
                m.length,
                m.closed,
                m.distinct,
                m.space_efficiency,
                m.avg_reads,
                m.worst_reads,
                m.avg_writes,
                m.worst_writes,
                m.max_hamming
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.single()?;
    let cap = resolve_cap(args.out.cap)?;
    let counter = cfg.build().map_err(UsageError::from)?;
    let mut states = Vec::new();
    let keep = matches!(cfg, CounterConfig::Brgc { dim } if dim <= BRGC_GOLDEN.len());
    let report = enumerate_cycle_observed(counter.as_ref(), cap, |s, _| {
        if keep {
            states.push(s.to_string());
        }
    })
    .map_err(internal)?;

    let mut problems = Vec::new();
    if !report.closed || !report.distinct {
        return Err(Failure::Check(format!(
            "{cfg}: cycle {} after {} steps",
            if report.distinct { "did not close within the cap" } else { "revisited a non-initial state" },
            report.steps
        )));
    }
    if let CounterConfig::Brgc { dim } = cfg {
        if let Some(golden) = BRGC_GOLDEN.get(dim.wrapping_sub(1)) {
            // Enumeration yields successors of the initial state; rotate.
            let mut seq = vec![states.last().cloned().unwrap_or_default()];
            seq.extend(states.iter().take(states.len().saturating_sub(1)).cloned());
            if seq != *golden {
                problems.push(format!("sequence {seq:?} differs from reference {golden:?}"));
            }
        }
    }
    let c = cfg.claimed_c();
    let verdict = verify_quasi_gray(&report, c).map_err(internal)?;
    if let Some(cx) = &verdict.counterexample {
        problems.push(format!(
            "not {c}-quasi-Gray: step {} {} -> {} has {:?} {}",
            cx.witness.step, cx.witness.from, cx.witness.to, cx.violation, cx.value
        ));
    }
    let checks = check_bounds(&report, &cfg.claimed_bounds());
    for ch in &checks {
        match &ch.outcome {
            Outcome::Fail => problems.push(format!(
                "{} {} violated: measured {} against {} ({})",
                ch.kind.name(),
                ch.expr,
                ch.measured,
                ch.bound,
                ch.source
            )),
            Outcome::Undecided => {
                eprintln!("warning: {} {} undecided near {} ({})", ch.kind.name(), ch.expr, ch.bound, ch.source)
            }
            Outcome::Delta { delta } => {
                eprintln!("note: {} {} differs from enumeration by {delta} ({})", ch.kind.name(), ch.bound, ch.source)
            }
            Outcome::Pass => {}
        }
    }

    let mut w = open_out(&args.out.out)?;
    match args.out.emit.unwrap_or(Emit::None) {
        Emit::Json => {
            #[derive(serde::Serialize)]
            struct VerifyDoc<'a> {
                pass: bool,
                verdict: &'a quasigray::harness::QuasiGrayVerdict,
                #[serde(flatten)]
                report: ReportDoc,
            }
            let doc =
                VerifyDoc { pass: problems.is_empty(), verdict: &verdict, report: ReportDoc::new(&report, checks) };
            write_json(&mut w, &doc)?;
        }
        Emit::Csv => write_csv(&mut w, &[collect_metrics(&report)])?,
        Emit::None => {
            if problems.is_empty() {
                writeln!(w, "PASS {cfg}: c={c}, {} bounds checked", checks.len())?;
            }
        }
    }
    w.flush()?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("FAIL {cfg}:\n  {}", problems.join("\n  "))))
    }
}

fn cmd_bench(args: &RunArgs) -> Result<(), Failure> {
    let configs = args.configs()?;
    let cap = resolve_cap(args.out.cap)?;
    let counters = configs.iter().map(|c| c.build()).collect::<Result<Vec<_>, _>>().map_err(UsageError::from)?;
    let reports = counters
        .par_iter()
        .map(|c| enumerate_cycle(c.as_ref(), cap))
        .collect::<Result<Vec<_>, _>>()
        .map_err(internal)?;
    let mut w = open_out(&args.out.out)?;
    match args.out.emit.unwrap_or(Emit::Csv) {
        Emit::Json => {
            let docs: Vec<ReportDoc> = reports.iter().map(|r| ReportDoc::new(r, vec![])).collect();
            write_json(&mut w, &docs)?;
        }
        Emit::Csv => write_csv(&mut w, &reports.iter().map(collect_metrics).collect::<Vec<_>>())?,
        Emit::None => {
            for (cfg, r) in configs.iter().zip(&reports) {
                writeln!(w, "{cfg}: length {} avg_reads {} worst_writes {}", r.length, r.avg_reads(), r.worst_writes)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_table1(args: &OutArgs) -> Result<(), Failure> {
    let cap = resolve_cap(args.cap)?;
    let rows = table1_configs().par_iter().map(|c| table_row(c, cap)).collect::<Result<Vec<_>, _>>()?;
    let mut w = open_out(&args.out)?;
    match args.emit.unwrap_or(Emit::Csv) {
        Emit::Json => write_json(&mut w, &rows)?,
        Emit::Csv => write_table_csv(&mut w, &rows)?,
        Emit::None => {
            for r in &rows {
                let m = &r.metrics;
                writeln!(
                    w,
                    "{} {}: length {} avg_reads {} avg_writes {}",
                    m.counter, m.params, m.length, m.avg_reads, m.avg_writes
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.verb {
        Verb::List => open_out(&None).map_err(Failure::from).and_then(|mut w| {
            cmd_list(&mut w)?;
            w.flush().map_err(Failure::from)
        }),
        Verb::Cycle(a) => cmd_cycle(a),
        Verb::Verify(a) => cmd_verify(a),
        Verb::Bench(a) => cmd_bench(a),
        Verb::Table1(a) => cmd_table1(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Check(m)) => {
            eprintln!("{m}");
            EXIT_FAIL
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            EXIT_FAIL
        }
    }
}
