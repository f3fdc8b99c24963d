//! Result artifacts: experiment reports (JSON/CSV), ladder files for
//! plotting, and run manifests.
//!
//! Reports are deterministic by construction: maps are ordered, densities
//! are rounded to 12 significant digits before they are stored, and nothing
//! volatile (timestamps, runtimes, machine shape) enters a report file.
//! Volatile facts belong to the run manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ReportError>;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to `digits` significant decimal digits by a round trip through the
/// shortest equivalent scientific string. Idempotent.
pub fn round_sig(v: f64, digits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits as usize - 1, v).parse().unwrap()
}

/// Serialization precision for densities and reference values.
pub fn round_density(v: f64) -> f64 {
    round_sig(v, 12)
}

/// 12-significant-digit scientific rendering, the CSV/ladder number format.
pub fn format_density(v: f64) -> String {
    format!("{:.11e}", v)
}

/// Scan parameter value. Integers normalize to the unsigned variant when
/// nonnegative so that serialization round trips compare equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(u64),
    Signed(i64),
    Real(f64),
    Text(String),
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as u64)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        if v >= 0 {
            ParamValue::Int(v as u64)
        } else {
            ParamValue::Signed(v)
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Signed(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

impl ParamValue {
    fn render_csv(&self) -> String {
        self.to_string()
    }
}

/// One scan's frozen result. Every field is deterministic given the scan
/// input; identical inputs serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub statistic: String,
    pub x: u64,
    pub params: BTreeMap<String, ParamValue>,
    pub counts: BTreeMap<String, u64>,
    pub densities: BTreeMap<String, f64>,
    pub references: BTreeMap<String, f64>,
    pub details: BTreeMap<String, String>,
}

impl ExperimentReport {
    pub fn new(statistic: &str, x: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            statistic: statistic.to_string(),
            x,
            params: BTreeMap::new(),
            counts: BTreeMap::new(),
            densities: BTreeMap::new(),
            references: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_count(mut self, key: &str, value: u64) -> Self {
        self.counts.insert(key.to_string(), value);
        self
    }

    /// Densities are rounded to 12 significant digits on the way in.
    pub fn with_density(mut self, key: &str, value: f64) -> Self {
        self.densities.insert(key.to_string(), round_density(value));
        self
    }

    pub fn with_reference(mut self, key: &str, value: f64) -> Self {
        self.references
            .insert(key.to_string(), round_density(value));
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<String>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(ReportError::Domain(format!(
                "unknown report format {other:?}; expected json or csv"
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    ParamInt,
    ParamSigned,
    ParamReal,
    Count,
    Density,
    Reference,
    Detail,
}

struct CsvCol {
    key: &'static str,
    kind: ColKind,
}

const fn col(key: &'static str, kind: ColKind) -> CsvCol {
    CsvCol { key, kind }
}

use ColKind::*;

/// Column layout of each statistic's CSV rendering. Every report field
/// appears as a column, so the CSV round trip is lossless.
fn csv_schema(statistic: &str) -> Option<&'static [CsvCol]> {
    const KFREE: &[CsvCol] = &[
        col("k", ParamInt),
        col("count_kfree", Count),
        col("density", Density),
        col("reference", Reference),
        col("abs_error", Density),
    ];
    const CONJECTURE: &[CsvCol] = &[
        col("k", ParamInt),
        col("total", Count),
        col("n_kfree", Count),
        col("s_kfree", Count),
        col("mismatch_n_free_s_not", Count),
        col("mismatch_s_free_n_not", Count),
        col("mismatch_total", Count),
        col("density_n_kfree", Density),
        col("density_s_kfree", Density),
        col("density_mismatch", Density),
        col("zeta_reciprocal", Reference),
    ];
    const SMALL_DIVISORS: &[CsvCol] = &[
        col("eps", ParamReal),
        col("threshold", Count),
        col("lcm", Count),
        col("count_divisible", Count),
        col("rate", Density),
    ];
    const GCD_SMOOTH: &[CsvCol] = &[
        col("count_smooth", Count),
        col("count_violation", Count),
        col("rate_smooth", Density),
        col("rate_violation", Density),
        col("threshold_log2x", Reference),
        col("pmax_histogram", Detail),
    ];
    const CLOSE_PAIRS: &[CsvCol] = &[
        col("count_pairs", Count),
        col("count_distinct_pairs", Count),
        col("density_pairs", Density),
        col("density_distinct", Density),
        col("q1_lower", Reference),
        col("q2_ratio", Reference),
        col("comparator_inv_log3", Reference),
    ];
    const WIRSING: &[CsvCol] = &[
        col("m_max", Count),
        col("argmax_total", Count),
        col("density_m_max", Density),
        col("lambda_hat", Reference),
        col("argmax_ratios", Detail),
    ];
    const POMERANCE: &[CsvCol] = &[
        col("a", ParamSigned),
        col("m", ParamInt),
        col("count_deficient", Count),
        col("density", Density),
        col("comparator", Reference),
    ];
    const EXCEPTIONAL: &[CsvCol] = &[
        col("fail_cond1", Count),
        col("fail_cond2", Count),
        col("fail_cond3", Count),
        col("fail_cond4", Count),
        col("fail_cond5", Count),
        col("fail_cond6", Count),
        col("count_exceptional", Count),
        col("density_exceptional", Density),
    ];
    const DIVISOR_TAIL: &[CsvCol] = &[
        col("k", ParamInt),
        col("y_exponent", ParamReal),
        col("count_any", Count),
        col("count_small", Count),
        col("count_large", Count),
        col("count_any_nonexceptional", Count),
        col("count_small_nonexceptional", Count),
        col("count_large_nonexceptional", Count),
        col("density_any", Density),
        col("density_any_nonexceptional", Density),
        col("y", Reference),
        col("bucket_split", Reference),
    ];
    match statistic {
        "kfree-density" => Some(KFREE),
        "conjecture" => Some(CONJECTURE),
        "small-divisors" => Some(SMALL_DIVISORS),
        "gcd-smooth" => Some(GCD_SMOOTH),
        "close-pairs" => Some(CLOSE_PAIRS),
        "wirsing" => Some(WIRSING),
        "pomerance" => Some(POMERANCE),
        "exceptional" => Some(EXCEPTIONAL),
        "divisor-tail" => Some(DIVISOR_TAIL),
        _ => None,
    }
}

fn report_to_csv(report: &ExperimentReport) -> Result<String> {
    let schema = csv_schema(&report.statistic).ok_or_else(|| {
        ReportError::Domain(format!(
            "no CSV layout for statistic {:?}; use json",
            report.statistic
        ))
    })?;
    let missing = |key: &str| ReportError::Malformed(format!("report lacks field {key}"));
    let mut header = String::from("statistic,x");
    let mut row = format!("{},{}", report.statistic, report.x);
    for c in schema {
        header.push(',');
        header.push_str(c.key);
        row.push(',');
        let cell = match c.kind {
            ParamInt | ParamSigned | ParamReal => report
                .params
                .get(c.key)
                .ok_or_else(|| missing(c.key))?
                .render_csv(),
            Count => report
                .counts
                .get(c.key)
                .ok_or_else(|| missing(c.key))?
                .to_string(),
            Density => format_density(*report.densities.get(c.key).ok_or_else(|| missing(c.key))?),
            Reference => {
                format_density(*report.references.get(c.key).ok_or_else(|| missing(c.key))?)
            }
            Detail => {
                let v = report.details.get(c.key).ok_or_else(|| missing(c.key))?;
                if v.contains(',') || v.contains('\n') {
                    return Err(ReportError::Malformed(format!(
                        "detail {} contains a delimiter",
                        c.key
                    )));
                }
                v.clone()
            }
        };
        row.push_str(&cell);
    }
    Ok(format!("{header}\n{row}\n"))
}

fn report_from_csv(text: &str) -> Result<ExperimentReport> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ReportError::Malformed("empty file".into()))?;
    let row = lines
        .next()
        .ok_or_else(|| ReportError::Malformed("missing data row".into()))?;
    let hcols: Vec<&str> = header.split(',').collect();
    let vcols: Vec<&str> = row.split(',').collect();
    if hcols.len() != vcols.len() {
        return Err(ReportError::Malformed(format!(
            "{} header columns vs {} values",
            hcols.len(),
            vcols.len()
        )));
    }
    if hcols.first() != Some(&"statistic") || hcols.get(1) != Some(&"x") {
        return Err(ReportError::Malformed(
            "header must start with statistic,x".into(),
        ));
    }
    let statistic = vcols[0];
    let schema = csv_schema(statistic)
        .ok_or_else(|| ReportError::Malformed(format!("unknown statistic {statistic:?}")))?;
    if hcols.len() != schema.len() + 2 {
        return Err(ReportError::Malformed(format!(
            "expected {} columns for {statistic}, found {}",
            schema.len() + 2,
            hcols.len()
        )));
    }
    let x: u64 = vcols[1]
        .parse()
        .map_err(|_| ReportError::Malformed(format!("bad x value {:?}", vcols[1])))?;
    let mut report = ExperimentReport::new(statistic, x);
    for (i, c) in schema.iter().enumerate() {
        if hcols[i + 2] != c.key {
            return Err(ReportError::Malformed(format!(
                "column {} should be {}, found {}",
                i + 2,
                c.key,
                hcols[i + 2]
            )));
        }
        let cell = vcols[i + 2];
        let bad = || ReportError::Malformed(format!("bad value {cell:?} in column {}", c.key));
        match c.kind {
            ParamInt => {
                let v: u64 = cell.parse().map_err(|_| bad())?;
                report.params.insert(c.key.into(), ParamValue::Int(v));
            }
            ParamSigned => {
                let v: i64 = cell.parse().map_err(|_| bad())?;
                report.params.insert(c.key.into(), v.into());
            }
            ParamReal => {
                let v: f64 = cell.parse().map_err(|_| bad())?;
                report.params.insert(c.key.into(), ParamValue::Real(v));
            }
            Count => {
                let v: u64 = cell.parse().map_err(|_| bad())?;
                report.counts.insert(c.key.into(), v);
            }
            Density => {
                let v: f64 = cell.parse().map_err(|_| bad())?;
                report.densities.insert(c.key.into(), v);
            }
            Reference => {
                let v: f64 = cell.parse().map_err(|_| bad())?;
                report.references.insert(c.key.into(), v);
            }
            Detail => {
                report.details.insert(c.key.into(), cell.to_string());
            }
        }
    }
    Ok(report)
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => report.to_json_string(),
        ReportFormat::Csv => report_to_csv(report),
    }
}

pub fn write_report(report: &ExperimentReport, path: &Path, format: ReportFormat) -> Result<()> {
    fs::write(path, render_report(report, format)?)?;
    Ok(())
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path)?;
    match format {
        ReportFormat::Json => Ok(serde_json::from_str(&text)?),
        ReportFormat::Csv => report_from_csv(&text),
    }
}

/// Writes a plot-ready ladder: `#`-prefixed header lines, then one row per
/// report with x and every density track in column order.
///
/// All reports must share a statistic and parameter set and be sorted by
/// strictly increasing x.
pub fn write_ladder(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    let first = reports
        .first()
        .ok_or_else(|| ReportError::Domain("ladder needs at least one report".into()))?;
    for r in reports {
        if r.statistic != first.statistic {
            return Err(ReportError::Domain(format!(
                "ladder mixes statistics {:?} and {:?}",
                first.statistic, r.statistic
            )));
        }
        if r.params != first.params {
            return Err(ReportError::Domain(
                "ladder mixes parameter sets".into(),
            ));
        }
        if r.densities.keys().ne(first.densities.keys()) {
            return Err(ReportError::Domain(
                "ladder reports disagree on density tracks".into(),
            ));
        }
    }
    for w in reports.windows(2) {
        if w[1].x <= w[0].x {
            return Err(ReportError::Domain(format!(
                "ladder x values must strictly increase ({} then {})",
                w[0].x, w[1].x
            )));
        }
    }
    let tracks: Vec<&String> = first.densities.keys().collect();
    let mut out = String::new();
    out.push_str(&format!("# statistic: {}\n", first.statistic));
    let params = if first.params.is_empty() {
        "none".to_string()
    } else {
        first
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", v.render_csv()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("# params: {params}\n"));
    out.push_str(&format!(
        "# columns: x {}\n",
        tracks
            .iter()
            .map(|t| t.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    ));
    for r in reports {
        out.push_str(&r.x.to_string());
        for t in &tracks {
            out.push(' ');
            out.push_str(&format_density(r.densities[*t]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything volatile about a run: when it happened, how it was invoked,
/// the effective configuration, wall time, machine shape, and digests of the
/// files it wrote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub timestamp: String,
    pub command_line: String,
    pub config: BTreeMap<String, ParamValue>,
    pub runtime_ms: u64,
    pub thread_count: usize,
    pub segment_len: u64,
    pub files: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(command_line: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command_line,
            config: BTreeMap::new(),
            runtime_ms: 0,
            thread_count: 0,
            segment_len: 0,
            files: Vec::new(),
        }
    }

    pub fn set_config(&mut self, key: &str, value: impl Into<ParamValue>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn record_file(&mut self, path: &Path) -> Result<()> {
        self.files.push(ManifestEntry {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
            bytes: fs::metadata(path)?.len(),
        });
        Ok(())
    }

    /// Paths whose current digest no longer matches the manifest.
    pub fn verify_files(&self) -> Vec<String> {
        self.files
            .iter()
            .filter(|e| sha256_hex(Path::new(&e.path)).map_or(true, |h| h != e.sha256))
            .map(|e| e.path.clone())
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        fs::write(path, s)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_kfree_report() -> ExperimentReport {
        ExperimentReport::new("kfree-density", 10_000_000)
            .with_param("k", 2u32)
            .with_count("count_kfree", 6_079_291)
            .with_density("density", 0.607_929_1)
            .with_reference("reference", 0.607_927_101_854)
            .with_density("abs_error", 1.998_146e-6)
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let r = sample_kfree_report();
        write_report(&r, &path, ReportFormat::Json).unwrap();
        let back = read_report(&path, ReportFormat::Json).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn identical_reports_serialize_identically() {
        let a = sample_kfree_report().to_json_string().unwrap();
        let b = sample_kfree_report().to_json_string().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_header_for_kfree_density_is_pinned() {
        let text = report_to_csv(&sample_kfree_report()).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "statistic,x,k,count_kfree,density,reference,abs_error"
        );
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let r = sample_kfree_report();
        write_report(&r, &path, ReportFormat::Csv).unwrap();
        let back = read_report(&path, ReportFormat::Csv).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn csv_rejects_unknown_statistic() {
        let r = ExperimentReport::new("made-up", 100);
        assert!(matches!(
            report_to_csv(&r),
            Err(ReportError::Domain(_))
        ));
    }

    #[test]
    fn rounding_is_idempotent_and_12_digits() {
        for v in [
            0.607_927_101_854_026_6,
            1.0 / 3.0,
            2.5e-13,
            0.999_999_999_999_93,
            123_456.789,
            0.0,
        ] {
            let r = round_density(v);
            assert_eq!(round_density(r), r, "v={v}");
            let s = format_density(r);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, r, "v={v}");
            assert!((r - v).abs() <= v.abs() * 5e-12, "v={v} r={r}");
        }
    }

    #[test]
    fn param_value_roundtrips() {
        for v in [
            ParamValue::Int(7),
            ParamValue::from(-3i64),
            ParamValue::Real(0.1),
            ParamValue::Text("q".into()),
        ] {
            let s = serde_json::to_string(&v).unwrap();
            let back: ParamValue = serde_json::from_str(&s).unwrap();
            assert_eq!(v, back, "serialized {s}");
        }
        // nonnegative i64 normalizes to Int so roundtrips stay equal
        assert_eq!(ParamValue::from(5i64), ParamValue::Int(5));
    }

    #[test]
    fn ladder_happy_path_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ladder.dat");
        let mk = |x: u64, d: f64| {
            ExperimentReport::new("kfree-density", x)
                .with_param("k", 2u32)
                .with_count("count_kfree", 1)
                .with_density("density", d)
                .with_density("abs_error", 0.0)
                .with_reference("reference", 0.6)
        };
        let rungs = vec![mk(100, 0.61), mk(1000, 0.608), mk(10_000, 0.6087)];
        write_ladder(&rungs, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# statistic: kfree-density"));
        assert_eq!(lines[1], "# params: k=2");
        assert_eq!(lines[2], "# columns: x abs_error density");
        assert_eq!(lines.len(), 6);
        assert!(lines[3].starts_with("100 "));

        assert!(write_ladder(&[], &path).is_err());
        let mut mixed = rungs.clone();
        mixed[1].statistic = "conjecture".into();
        assert!(write_ladder(&mixed, &path).is_err());
        let unsorted = vec![mk(1000, 0.6), mk(100, 0.61)];
        assert!(write_ladder(&unsorted, &path).is_err());
        let mut other_params = rungs.clone();
        other_params[2] = other_params[2].clone().with_param("k", 3u32);
        assert!(write_ladder(&other_params, &path).is_err());
    }

    #[test]
    fn manifest_records_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("out.json");
        fs::write(&data, b"{}\n").unwrap();
        let mut m = RunManifest::new("alab test".into());
        m.set_config("x", 1000u64);
        m.set_config("format", "json");
        m.runtime_ms = 42;
        m.record_file(&data).unwrap();
        let mpath = dir.path().join("out.manifest.json");
        m.write(&mpath).unwrap();
        let back = RunManifest::read(&mpath).unwrap();
        assert_eq!(back.files.len(), 1);
        assert_eq!(back.files[0].bytes, 3);
        assert!(back.verify_files().is_empty());
        fs::write(&data, b"tampered").unwrap();
        assert_eq!(back.verify_files(), vec![data.display().to_string()]);
        // RFC3339 timestamp parses back
        assert!(chrono::DateTime::parse_from_rfc3339(&back.timestamp).is_ok());
    }
}
