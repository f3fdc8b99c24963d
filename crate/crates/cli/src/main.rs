//! Command-line front end: one subcommand per statistic, a ladder mode that
//! runs a statistic across increasing x and writes plot data, and a
//! selfcheck mode that replays every statistic against the naive per-n
//! reference. Exit codes: 0 success, 1 domain or configuration error,
//! 2 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use aliquot_lab::experiments::{self, RunConfig, ScanError, WirsingOptions, DEFAULT_Y_EXPONENT};
use aliquot_lab::oracle;
use aliquot_lab::report::{
    format_density, render_report, write_ladder, write_report, ExperimentReport, ReportError,
    ReportFormat, RunManifest,
};

#[derive(Debug)]
enum CliError {
    /// Bad input or configuration; exit 1.
    Domain(String),
    /// A cross-check or internal contract failed; exit 2.
    Invariant(String),
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Domain(_) | ScanError::Resource(_) => CliError::Domain(e.to_string()),
            // scans only see validated inputs here, so anything else means
            // the library broke one of its own contracts
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Domain(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "alab",
    version,
    about = "Segmented-sieve statistics for the sum-of-proper-divisors map"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ExecArgs {
    /// Segment length in integers (scientific notation accepted)
    #[arg(long, value_parser = parse_u64_scientific)]
    segment_size: Option<u64>,
    /// Worker threads; 0 means machine parallelism. Overrides ALAB_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ScanArgs {
    /// Upper bound of the scan range [1, x]; scientific notation accepted
    #[arg(long, value_parser = parse_u64_scientific)]
    x: u64,
    /// Report file; when omitted the report goes to stdout and the summary
    /// to stderr. A manifest is written next to the report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Joint k-freeness of n and its aliquot image s(n)
    Conjecture {
        #[command(flatten)]
        scan: ScanArgs,
        /// Power threshold: a k-th power of a prime spoils k-freeness
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
    /// Density of k-free integers against the zeta reciprocal
    KfreeDensity {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
    /// How often every integer up to a small threshold divides sigma(n)
    SmallDivisors {
        #[command(flatten)]
        scan: ScanArgs,
        /// Threshold is (log log x)^(1 - eps)
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Smoothness census of gcd(n, sigma(n))
    GcdSmooth {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Integers whose two largest prime factors sit unusually close
    ClosePairs {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Maximum multiplicity M(x) of an abundancy ratio, with its argmax
    Wirsing {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Integers with no unitary prime factor in a fixed residue class
    Pomerance {
        #[command(flatten)]
        scan: ScanArgs,
        /// Residue class, may be negative
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        a: i64,
        /// Modulus, coprime to the residue
        #[arg(long, default_value_t = 2)]
        m: u64,
    },
    /// Census of the six typicality conditions
    Exceptional {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// How often s(n) has a k-th-power divisor above the y threshold
    DivisorTail {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, default_value_t = 4)]
        k: u32,
        /// y = (log log x)^y_exponent
        #[arg(long, default_value_t = DEFAULT_Y_EXPONENT)]
        y_exponent: f64,
        /// Quote the rate over typical (nonexceptional) n in the summary
        #[arg(long)]
        restrict_nonexceptional: bool,
    },
    /// One statistic across increasing x values, written as plot data
    Ladder {
        /// Statistic to ladder (any scan subcommand name)
        #[arg(long)]
        stat: String,
        /// Comma-separated x values, strictly increasing (e.g. 1e4,1e5,1e6)
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value_t = DEFAULT_Y_EXPONENT)]
        y_exponent: f64,
        /// Plot data file (whitespace-separated, # header lines)
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Recompute every statistic at x = 10^4 and diff it against the naive
    /// per-n reference
    Selfcheck {
        #[command(flatten)]
        exec: ExecArgs,
    },
}

/// Accepts plain integers and scientific notation that lands exactly on an
/// integer: "1e7", "2.5e3". Anything fractional is rejected.
fn parse_u64_scientific(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let lower = t.to_ascii_lowercase();
    let (mantissa, exponent) = lower
        .split_once('e')
        .ok_or_else(|| format!("expected an integer or scientific notation, got {s:?}"))?;
    let exponent: u32 = exponent
        .parse()
        .map_err(|_| format!("bad exponent in {s:?}"))?;
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad mantissa in {s:?}"));
    }
    if frac_part.len() as u32 > exponent {
        return Err(format!("{s} is not an integer"));
    }
    let scale = 10u64
        .checked_pow(exponent - frac_part.len() as u32)
        .ok_or_else(|| format!("{s} overflows a 64-bit integer"))?;
    digits
        .parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(scale))
        .ok_or_else(|| format!("{s} overflows a 64-bit integer"))
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    ReportFormat::from_name(s).map_err(|e| e.to_string())
}

/// Flag beats ALAB_THREADS beats machine parallelism (0 = let the pool decide).
fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("ALAB_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Domain(format!("ALAB_THREADS must be a thread count, got {v:?}"))
        }),
        Err(_) => Ok(0),
    }
}

struct StatParams {
    k: u32,
    eps: f64,
    a: i64,
    m: u64,
    y_exponent: f64,
    restrict_nonexceptional: bool,
}

impl Default for StatParams {
    fn default() -> Self {
        Self {
            k: 4,
            eps: 0.1,
            a: -1,
            m: 2,
            y_exponent: DEFAULT_Y_EXPONENT,
            restrict_nonexceptional: false,
        }
    }
}

const STAT_NAMES: &[&str] = &[
    "conjecture",
    "kfree-density",
    "small-divisors",
    "gcd-smooth",
    "close-pairs",
    "wirsing",
    "pomerance",
    "exceptional",
    "divisor-tail",
];

fn run_stat(
    stat: &str,
    x: u64,
    p: &StatParams,
    cfg: &RunConfig,
) -> Result<(ExperimentReport, String)> {
    // uniform floor across statistics: every scale-dependent threshold in
    // the laboratory needs the third iterated log, hence x >= 100
    experiments::IteratedLogs::new(x)?;
    Ok(match stat {
        "conjecture" => {
            let s = experiments::scan_conjecture(x, p.k, cfg)?;
            let line = format!(
                "conjecture x={x} k={}: {} of {} disagree on {}-freeness (density {})",
                p.k,
                s.mismatch_total(),
                s.total,
                p.k,
                format_density(s.mismatch_density())
            );
            (s.to_report()?, line)
        }
        "kfree-density" => {
            let s = experiments::scan_kfree_density(x, p.k, cfg)?;
            let report = s.to_report()?;
            let line = format!(
                "kfree-density x={x} k={}: density {} (off the zeta reciprocal by {})",
                p.k,
                format_density(s.density()),
                format_density(report.densities["abs_error"])
            );
            (report, line)
        }
        "small-divisors" => {
            let s = experiments::scan_small_divisor_rate(x, p.eps, cfg)?;
            let line = format!(
                "small-divisors x={x} eps={}: every d <= {} divides sigma(n) for {} of {x} (rate {})",
                p.eps,
                s.threshold,
                s.count_divisible,
                format_density(s.rate())
            );
            (s.to_report(), line)
        }
        "gcd-smooth" => {
            let s = experiments::scan_gcd_smoothness(x, cfg)?;
            let line = format!(
                "gcd-smooth x={x}: gcd(n, sigma(n)) is (log log x)-smooth for {} of {x} ({} violations)",
                s.count_smooth, s.count_violation
            );
            (s.to_report(), line)
        }
        "close-pairs" => {
            let s = experiments::scan_close_prime_pairs(x, cfg)?;
            let line = format!(
                "close-pairs x={x}: {} integers have a close top prime pair, {} with distinct primes",
                s.count_pairs, s.count_distinct
            );
            (s.to_report(), line)
        }
        "wirsing" => {
            // switch to bucketed two-pass counting when the all-ratios table
            // would blow the memory budget
            let mut opts = WirsingOptions::default();
            opts.two_pass = 16u128 * x as u128 > opts.budget_bytes as u128;
            let s = experiments::scan_wirsing_popularity(x, cfg, &opts)?;
            let line = format!(
                "wirsing x={x}: M(x) = {} attained by {} ratio(s), lambda_hat = {:.4}",
                s.m_max, s.argmax_total, s.lambda_hat
            );
            (s.to_report(), line)
        }
        "pomerance" => {
            let s = experiments::scan_pomerance_deficiency(x, p.a, p.m, cfg)?;
            let line = format!(
                "pomerance x={x} a={} m={}: {} integers have no unitary prime in the class (density {})",
                p.a,
                p.m,
                s.count_deficient,
                format_density(s.density())
            );
            (s.to_report(), line)
        }
        "exceptional" => {
            let s = experiments::scan_exceptional_set(x, cfg)?;
            let line = format!(
                "exceptional x={x}: |E(x)| = {} (density {})",
                s.count_exceptional,
                format_density(s.density())
            );
            (s.to_report(), line)
        }
        "divisor-tail" => {
            let s = experiments::scan_divisor_tail(x, p.k, cfg)?;
            let line = if p.restrict_nonexceptional {
                format!(
                    "divisor-tail x={x} k={} (typical n only): s(n) has a {}th-power divisor above y for {} (density {})",
                    p.k,
                    p.k,
                    s.count_any_nonexceptional,
                    format_density(s.density_any_nonexceptional())
                )
            } else {
                format!(
                    "divisor-tail x={x} k={}: s(n) has a {}th-power divisor above y for {} of {} (density {})",
                    p.k,
                    p.k,
                    s.count_any,
                    s.x - 1,
                    format_density(s.density_any())
                )
            };
            (s.to_report(), line)
        }
        other => {
            return Err(CliError::Domain(format!(
                "unknown statistic {other:?}; expected one of {}",
                STAT_NAMES.join(", ")
            )))
        }
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", out.display()))
}

fn prepare_parent(out: &Path) -> Result<()> {
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Domain(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    Ok(())
}

fn new_manifest(cfg: &RunConfig, started: Instant) -> RunManifest {
    let mut manifest = RunManifest::new(
        std::env::args().collect::<Vec<_>>().join(" "),
    );
    manifest.thread_count = cfg.threads;
    manifest.segment_len = cfg.segment_len;
    manifest.runtime_ms = started.elapsed().as_millis() as u64;
    manifest
}

fn run_scan_command(stat: &str, scan: &ScanArgs, p: &StatParams) -> Result<()> {
    let started = Instant::now();
    let cfg = RunConfig {
        threads: resolve_threads(scan.exec.threads)?,
        segment_len: scan.exec.segment_size.unwrap_or(RunConfig::default().segment_len),
        y_exponent: p.y_exponent,
    };
    let (report, summary) = run_stat(stat, scan.x, p, &cfg)?;
    match &scan.out {
        Some(out) => {
            prepare_parent(out)?;
            write_report(&report, out, scan.format)?;
            let mut manifest = new_manifest(&cfg, started);
            manifest.set_config("statistic", stat);
            manifest.set_config("x", scan.x);
            manifest.set_config("format", scan.format.extension());
            manifest.set_config("k", p.k);
            manifest.set_config("eps", p.eps);
            manifest.set_config("a", p.a);
            manifest.set_config("m", p.m);
            manifest.set_config("y_exponent", p.y_exponent);
            manifest.record_file(out)?;
            manifest.write(&manifest_path(out))?;
            println!("{summary} -> {}", out.display());
        }
        None => {
            print!("{}", render_report(&report, scan.format)?);
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn run_ladder(
    stat: &str,
    xs: &str,
    p: &StatParams,
    out: &Path,
    exec: &ExecArgs,
) -> Result<()> {
    let started = Instant::now();
    let cfg = RunConfig {
        threads: resolve_threads(exec.threads)?,
        segment_len: exec.segment_size.unwrap_or(RunConfig::default().segment_len),
        y_exponent: p.y_exponent,
    };
    let mut values = Vec::new();
    for piece in xs.split(',') {
        values.push(parse_u64_scientific(piece).map_err(CliError::Domain)?);
    }
    let mut reports = Vec::new();
    for &x in &values {
        reports.push(run_stat(stat, x, p, &cfg)?.0);
    }
    prepare_parent(out)?;
    write_ladder(&reports, out)?;
    let mut manifest = new_manifest(&cfg, started);
    manifest.set_config("statistic", stat);
    manifest.set_config(
        "x",
        values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.set_config("k", p.k);
    manifest.set_config("eps", p.eps);
    manifest.set_config("a", p.a);
    manifest.set_config("m", p.m);
    manifest.set_config("y_exponent", p.y_exponent);
    manifest.record_file(out)?;
    manifest.write(&manifest_path(out))?;
    println!(
        "ladder {stat}: {} rungs ({}) -> {}",
        reports.len(),
        values
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", "),
        out.display()
    );
    Ok(())
}

fn run_selfcheck(exec: &ExecArgs) -> Result<()> {
    let x = 10_000u64;
    let cfg = RunConfig {
        threads: resolve_threads(exec.threads)?,
        segment_len: exec.segment_size.unwrap_or(RunConfig::default().segment_len),
        ..RunConfig::default()
    };
    let jobs: Vec<(String, StatParams)> = vec![
        ("conjecture".into(), StatParams { k: 2, ..Default::default() }),
        ("conjecture".into(), StatParams { k: 4, ..Default::default() }),
        ("kfree-density".into(), StatParams { k: 2, ..Default::default() }),
        ("kfree-density".into(), StatParams { k: 3, ..Default::default() }),
        ("kfree-density".into(), StatParams { k: 4, ..Default::default() }),
        ("small-divisors".into(), StatParams::default()),
        ("gcd-smooth".into(), StatParams::default()),
        ("close-pairs".into(), StatParams::default()),
        ("wirsing".into(), StatParams::default()),
        ("pomerance".into(), StatParams::default()),
        ("exceptional".into(), StatParams::default()),
        ("divisor-tail".into(), StatParams { k: 4, ..Default::default() }),
    ];
    let corrupt = std::env::var("ALAB_TEST_CORRUPT_SIEVE").is_ok_and(|v| v == "1");
    let mut mismatches = 0usize;
    for (i, (stat, params)) in jobs.iter().enumerate() {
        let (mut report, _) = run_stat(stat, x, params, &cfg)?;
        if corrupt && i == 0 {
            // test hook: damage one sieved count so the invariant exit path
            // is exercisable end to end
            if let Some(total) = report.counts.get_mut("total") {
                *total += 1;
            }
        }
        let diffs = oracle::diff_against_reference(&report);
        let label = match report.params.len() {
            0 => stat.clone(),
            _ => format!(
                "{stat} ({})",
                report
                    .params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        };
        if diffs.is_empty() {
            println!("selfcheck {label}: ok");
        } else {
            mismatches += 1;
            println!("selfcheck {label}: MISMATCH");
            for d in &diffs {
                println!("  {d}");
            }
        }
    }
    if mismatches > 0 {
        return Err(CliError::Invariant(format!(
            "selfcheck found {mismatches} statistic(s) disagreeing with the naive reference"
        )));
    }
    println!("selfcheck: {} statistics match the naive reference at x = {x}", jobs.len());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Conjecture { scan, k } => run_scan_command(
            "conjecture",
            scan,
            &StatParams { k: *k, ..Default::default() },
        ),
        Command::KfreeDensity { scan, k } => run_scan_command(
            "kfree-density",
            scan,
            &StatParams { k: *k, ..Default::default() },
        ),
        Command::SmallDivisors { scan, eps } => run_scan_command(
            "small-divisors",
            scan,
            &StatParams { eps: *eps, ..Default::default() },
        ),
        Command::GcdSmooth { scan } => {
            run_scan_command("gcd-smooth", scan, &StatParams::default())
        }
        Command::ClosePairs { scan } => {
            run_scan_command("close-pairs", scan, &StatParams::default())
        }
        Command::Wirsing { scan } => run_scan_command("wirsing", scan, &StatParams::default()),
        Command::Pomerance { scan, a, m } => run_scan_command(
            "pomerance",
            scan,
            &StatParams { a: *a, m: *m, ..Default::default() },
        ),
        Command::Exceptional { scan } => {
            run_scan_command("exceptional", scan, &StatParams::default())
        }
        Command::DivisorTail {
            scan,
            k,
            y_exponent,
            restrict_nonexceptional,
        } => run_scan_command(
            "divisor-tail",
            scan,
            &StatParams {
                k: *k,
                y_exponent: *y_exponent,
                restrict_nonexceptional: *restrict_nonexceptional,
                ..Default::default()
            },
        ),
        Command::Ladder {
            stat,
            x,
            k,
            eps,
            a,
            m,
            y_exponent,
            out,
            exec,
        } => run_ladder(
            stat,
            x,
            &StatParams {
                k: *k,
                eps: *eps,
                a: *a,
                m: *m,
                y_exponent: *y_exponent,
                restrict_nonexceptional: false,
            },
            out,
            exec,
        ),
        Command::Selfcheck { exec } => run_selfcheck(exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version travel through clap's error channel but
            // are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
