//! Independent reference implementations of every statistic, deliberately
//! naive: divisor-enumeration sigma, trial-division factoring, and direct
//! definitional checks, sharing no code with the sieve pipeline. Meant to
//! audit scan reports at small x (low tens of thousands).

use std::collections::BTreeMap;

use crate::experiments::gcd_smooth::format_histogram;
use crate::experiments::wirsing::ARGMAX_REPORT_CAP;
use crate::report::{round_density, ExperimentReport, ParamValue};

/// sigma(n) by enumerating divisor pairs d and n/d with d <= sqrt(n).
pub fn sigma_naive(n: u64) -> u64 {
    assert!(n >= 1);
    let mut s = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            let q = n / d;
            if q != d {
                s += q;
            }
        }
        d += 1;
    }
    s
}

pub fn aliquot_naive(n: u64) -> u64 {
    sigma_naive(n) - n
}

/// Ascending (prime, exponent) pairs by trial division.
pub fn factorize_naive(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// k-freeness straight from the definition: no m >= 2 has m^k | n. Any such
/// m contains a prime p with p^k | m^k | n, so this agrees with the
/// prime-exponent characterization without using one.
pub fn is_kfree_naive(n: u64, k: u32) -> bool {
    assert!(n >= 1 && k >= 2);
    let mut m = 2u64;
    loop {
        match m.checked_pow(k) {
            Some(mk) if mk <= n => {
                if n % mk == 0 {
                    return false;
                }
            }
            _ => return true,
        }
        m += 1;
    }
}

pub fn gcd_naive(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn largest_prime_naive(n: u64) -> u64 {
    factorize_naive(n).last().map_or(1, |&(p, _)| p)
}

struct Logs {
    log_x: f64,
    log2_x: f64,
    log3_x: f64,
}

fn logs_of(x: u64) -> Logs {
    let log_x = (x as f64).ln();
    let log2_x = log_x.ln();
    Logs {
        log_x,
        log2_x,
        log3_x: log2_x.ln(),
    }
}

/// The six typicality conditions, recomputed from scratch. The threshold
/// expressions mirror the scan's formulas term for term so that equal inputs
/// give bit-equal f64 comparisons.
fn conditions_naive(n: u64, x: u64, logs: &Logs) -> [bool; 6] {
    let fs = factorize_naive(n);
    let sigma = sigma_naive(n);
    let gp = largest_prime_naive(gcd_naive(n, sigma));
    let pmax = fs.last().map_or(1, |&(p, _)| p);
    let second = if fs.len() >= 2 { fs[fs.len() - 2].0 } else { 1 };
    let powerful: u64 = fs
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(p, e)| p.pow(e))
        .product();
    let x_over_log_x = x as f64 / logs.log_x;
    let p_large = (logs.log_x / (10.0 * logs.log3_x)).exp();
    let spread = (logs.log_x / (logs.log3_x * logs.log3_x)).exp();
    [
        n as f64 > x_over_log_x,
        powerful as f64 <= logs.log2_x,
        pmax as f64 > p_large,
        fs.last().is_some_and(|&(_, e)| e == 1),
        gp as f64 <= logs.log2_x,
        pmax as f64 > second as f64 * spread,
    ]
}

/// What the naive route expects a report to contain: exact counts, densities
/// derived as count/x from named count keys, and exact detail strings.
struct Reference {
    counts: BTreeMap<String, u64>,
    density_pairs: Vec<(&'static str, &'static str)>,
    details: BTreeMap<String, String>,
}

impl Reference {
    fn new() -> Self {
        Self {
            counts: BTreeMap::new(),
            density_pairs: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    fn count(mut self, key: &str, v: u64) -> Self {
        self.counts.insert(key.to_string(), v);
        self
    }

    fn densities(mut self, pairs: &[(&'static str, &'static str)]) -> Self {
        self.density_pairs.extend_from_slice(pairs);
        self
    }

    fn detail(mut self, key: &str, v: String) -> Self {
        self.details.insert(key.to_string(), v);
        self
    }
}

fn conjecture_reference(x: u64, k: u32) -> Reference {
    let (mut n_kfree, mut s_kfree, mut fwd, mut back) = (0u64, 0u64, 0u64, 0u64);
    for n in 2..=x {
        let n_free = is_kfree_naive(n, k);
        let s_free = is_kfree_naive(aliquot_naive(n), k);
        n_kfree += u64::from(n_free);
        s_kfree += u64::from(s_free);
        fwd += u64::from(n_free && !s_free);
        back += u64::from(s_free && !n_free);
    }
    Reference::new()
        .count("total", x - 1)
        .count("n_kfree", n_kfree)
        .count("s_kfree", s_kfree)
        .count("mismatch_n_free_s_not", fwd)
        .count("mismatch_s_free_n_not", back)
        .count("mismatch_total", fwd + back)
        .densities(&[
            ("density_n_kfree", "n_kfree"),
            ("density_s_kfree", "s_kfree"),
            ("density_mismatch", "mismatch_total"),
        ])
}

fn kfree_reference(x: u64, k: u32) -> Reference {
    let count = (2..=x).filter(|&n| is_kfree_naive(n, k)).count() as u64;
    // `abs_error` and `reference` involve the zeta constant, which has no
    // naive recomputation; they are checked elsewhere
    Reference::new()
        .count("count_kfree", count)
        .densities(&[("density", "count_kfree")])
}

fn small_divisors_reference(x: u64, eps: f64) -> Reference {
    let logs = logs_of(x);
    let threshold = logs.log2_x.powf(1.0 - eps).floor() as u64;
    let lcm = (1..=threshold.max(1)).fold(1u64, |l, i| l / gcd_naive(l, i) * i);
    let count = (1..=x).filter(|&n| sigma_naive(n) % lcm == 0).count() as u64;
    Reference::new()
        .count("threshold", threshold)
        .count("lcm", lcm)
        .count("count_divisible", count)
        .densities(&[("rate", "count_divisible")])
}

fn gcd_smooth_reference(x: u64) -> Reference {
    let logs = logs_of(x);
    let bucket = |p: u64| {
        let mut b = 0usize;
        let mut cap = 1u64;
        while cap < p {
            cap *= 2;
            b += 1;
        }
        b
    };
    let mut hist = vec![0u64; bucket(x) + 1];
    let mut smooth = 0u64;
    for n in 1..=x {
        let pmax = largest_prime_naive(gcd_naive(n, sigma_naive(n)));
        smooth += u64::from(pmax as f64 <= logs.log2_x);
        hist[bucket(pmax)] += 1;
    }
    Reference::new()
        .count("count_smooth", smooth)
        .count("count_violation", x - smooth)
        .densities(&[
            ("rate_smooth", "count_smooth"),
            ("rate_violation", "count_violation"),
        ])
        .detail("pmax_histogram", format_histogram(&hist))
}

fn close_pairs_reference(x: u64) -> Reference {
    let logs = logs_of(x);
    let q1_lower = (logs.log_x / (10.0 * logs.log3_x)).exp();
    let q2_ratio = (-logs.log_x / (logs.log3_x * logs.log3_x)).exp();
    let (mut pairs, mut distinct) = (0u64, 0u64);
    for n in 1..=x {
        let fs = factorize_naive(n);
        let mut any = false;
        let mut two = false;
        // all pairs q2 <= q1 of prime factors, repeats allowed at exponent 2+
        for i in 0..fs.len() {
            let (q1, e1) = fs[i];
            if q1 as f64 <= q1_lower {
                continue;
            }
            let q2_min = q1 as f64 * q2_ratio;
            if e1 >= 2 {
                any = true;
            }
            for f in &fs[..i] {
                if f.0 as f64 >= q2_min {
                    any = true;
                    two = true;
                }
            }
        }
        pairs += u64::from(any);
        distinct += u64::from(two);
    }
    Reference::new()
        .count("count_pairs", pairs)
        .count("count_distinct_pairs", distinct)
        .densities(&[
            ("density_pairs", "count_pairs"),
            ("density_distinct", "count_distinct_pairs"),
        ])
}

fn wirsing_reference(x: u64) -> Reference {
    let mut tally: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for m in 1..=x {
        let s = sigma_naive(m);
        let g = gcd_naive(s, m);
        *tally.entry((s / g, m / g)).or_insert(0) += 1;
    }
    let m_max = tally.values().copied().max().unwrap_or(0);
    let mut argmax: Vec<(u64, u64)> = tally
        .into_iter()
        .filter(|&(_, c)| c == m_max)
        .map(|(r, _)| r)
        .collect();
    argmax.sort_unstable_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)));
    let rendered = argmax
        .iter()
        .take(ARGMAX_REPORT_CAP)
        .map(|&(n, d)| format!("{n}/{d}"))
        .collect::<Vec<_>>()
        .join(" ");
    Reference::new()
        .count("m_max", m_max)
        .count("argmax_total", argmax.len() as u64)
        .densities(&[("density_m_max", "m_max")])
        .detail("argmax_ratios", rendered)
}

fn pomerance_reference(x: u64, a: i64, m: u64) -> Reference {
    let a_norm = a.rem_euclid(m as i64) as u64;
    let mut count = 1u64; // n = 1 has no unitary primes
    for n in 2..=x {
        let hit = factorize_naive(n)
            .iter()
            .any(|&(p, e)| e == 1 && p % m == a_norm);
        count += u64::from(!hit);
    }
    Reference::new()
        .count("count_deficient", count)
        .densities(&[("density", "count_deficient")])
}

fn exceptional_reference(x: u64) -> Reference {
    let logs = logs_of(x);
    let mut fail = [0u64; 6];
    let mut exceptional = 0u64;
    for n in 1..=x {
        let passes = conditions_naive(n, x, &logs);
        for (slot, &ok) in fail.iter_mut().zip(&passes) {
            *slot += u64::from(!ok);
        }
        exceptional += u64::from(passes.iter().any(|&ok| !ok));
    }
    let mut r = Reference::new();
    for (i, &c) in fail.iter().enumerate() {
        r = r.count(&format!("fail_cond{}", i + 1), c);
    }
    r.count("count_exceptional", exceptional)
        .densities(&[("density_exceptional", "count_exceptional")])
}

fn divisor_tail_reference(x: u64, k: u32, y_exponent: f64) -> Reference {
    let logs = logs_of(x);
    let y = logs.log2_x.powf(y_exponent);
    let split = (logs.log_x / (2.0 * logs.log3_x)).exp();
    let mut c = [0u64; 6]; // any, small, large, then the nonexceptional trio
    for n in 2..=x {
        let s = aliquot_naive(n);
        let (mut any, mut small, mut large) = (false, false, false);
        for &(p, e) in &factorize_naive(s) {
            if e < k {
                continue;
            }
            let v = p.pow(k) as f64;
            if v > y {
                any = true;
                if v <= split {
                    small = true;
                } else {
                    large = true;
                }
            }
        }
        if !any {
            continue;
        }
        c[0] += 1;
        c[1] += u64::from(small);
        c[2] += u64::from(large);
        if conditions_naive(n, x, &logs).iter().all(|&ok| ok) {
            c[3] += 1;
            c[4] += u64::from(small);
            c[5] += u64::from(large);
        }
    }
    Reference::new()
        .count("count_any", c[0])
        .count("count_small", c[1])
        .count("count_large", c[2])
        .count("count_any_nonexceptional", c[3])
        .count("count_small_nonexceptional", c[4])
        .count("count_large_nonexceptional", c[5])
        .densities(&[
            ("density_any", "count_any"),
            ("density_any_nonexceptional", "count_any_nonexceptional"),
        ])
}

fn param_u64(report: &ExperimentReport, key: &str) -> Result<u64, String> {
    match report.params.get(key) {
        Some(ParamValue::Int(v)) => Ok(*v),
        Some(other) => Err(format!(
            "{}: parameter '{key}' should be a nonnegative integer, found {other:?}",
            report.statistic
        )),
        None => Err(format!("{}: parameter '{key}' is missing", report.statistic)),
    }
}

fn param_i64(report: &ExperimentReport, key: &str) -> Result<i64, String> {
    match report.params.get(key) {
        Some(ParamValue::Int(v)) if *v <= i64::MAX as u64 => Ok(*v as i64),
        Some(ParamValue::Signed(v)) => Ok(*v),
        Some(other) => Err(format!(
            "{}: parameter '{key}' should be an integer, found {other:?}",
            report.statistic
        )),
        None => Err(format!("{}: parameter '{key}' is missing", report.statistic)),
    }
}

fn param_f64(report: &ExperimentReport, key: &str) -> Result<f64, String> {
    match report.params.get(key) {
        Some(ParamValue::Real(v)) => Ok(*v),
        Some(ParamValue::Int(v)) => Ok(*v as f64),
        Some(other) => Err(format!(
            "{}: parameter '{key}' should be numeric, found {other:?}",
            report.statistic
        )),
        None => Err(format!("{}: parameter '{key}' is missing", report.statistic)),
    }
}

/// Recomputes a report's counts, count-derived densities, and details with
/// the naive implementations and describes every disagreement. An empty
/// result means the report matches the reference. Intended for small x; the
/// naive pass is quadratic-ish in x.
pub fn diff_against_reference(report: &ExperimentReport) -> Vec<String> {
    let x = report.x;
    let reference = match report.statistic.as_str() {
        "conjecture" => match param_u64(report, "k") {
            Ok(k) => conjecture_reference(x, k as u32),
            Err(e) => return vec![e],
        },
        "kfree-density" => match param_u64(report, "k") {
            Ok(k) => kfree_reference(x, k as u32),
            Err(e) => return vec![e],
        },
        "small-divisors" => match param_f64(report, "eps") {
            Ok(eps) => small_divisors_reference(x, eps),
            Err(e) => return vec![e],
        },
        "gcd-smooth" => gcd_smooth_reference(x),
        "close-pairs" => close_pairs_reference(x),
        "wirsing" => wirsing_reference(x),
        "pomerance" => match (param_i64(report, "a"), param_u64(report, "m")) {
            (Ok(a), Ok(m)) => pomerance_reference(x, a, m),
            (Err(e), _) | (_, Err(e)) => return vec![e],
        },
        "exceptional" => exceptional_reference(x),
        "divisor-tail" => match (param_u64(report, "k"), param_f64(report, "y_exponent")) {
            (Ok(k), Ok(y)) => divisor_tail_reference(x, k as u32, y),
            (Err(e), _) | (_, Err(e)) => return vec![e],
        },
        other => return vec![format!("no reference implementation for statistic '{other}'")],
    };
    compare(report, &reference)
}

fn compare(report: &ExperimentReport, reference: &Reference) -> Vec<String> {
    let mut diffs = Vec::new();
    let stat = &report.statistic;
    let x = report.x;
    for (key, want) in &reference.counts {
        match report.counts.get(key) {
            Some(got) if got == want => {}
            Some(got) => diffs.push(format!(
                "{stat} x={x}: count '{key}' is {got}, reference computes {want}"
            )),
            None => diffs.push(format!(
                "{stat} x={x}: count '{key}' is missing from the report"
            )),
        }
    }
    for key in report.counts.keys() {
        if !reference.counts.contains_key(key) {
            diffs.push(format!(
                "{stat} x={x}: count '{key}' has no reference counterpart"
            ));
        }
    }
    for &(dk, ck) in &reference.density_pairs {
        let want = round_density(reference.counts[ck] as f64 / x as f64);
        match report.densities.get(dk) {
            Some(&got) if got == want => {}
            Some(&got) => diffs.push(format!(
                "{stat} x={x}: density '{dk}' is {got:e}, reference computes {want:e}"
            )),
            None => diffs.push(format!(
                "{stat} x={x}: density '{dk}' is missing from the report"
            )),
        }
    }
    for (key, want) in &reference.details {
        match report.details.get(key) {
            Some(got) if got == want => {}
            Some(got) => diffs.push(format!(
                "{stat} x={x}: detail '{key}' is '{got}', reference computes '{want}'"
            )),
            None => diffs.push(format!(
                "{stat} x={x}: detail '{key}' is missing from the report"
            )),
        }
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;
    use crate::experiments::{self, RunConfig, WirsingOptions};

    #[test]
    fn naive_helpers_agree_with_arith() {
        for n in 1..=2000u64 {
            let f = arith::factorize(n).unwrap();
            assert_eq!(sigma_naive(n), arith::divisor_sigma(&f).unwrap(), "n={n}");
            assert_eq!(factorize_naive(n), f.factors().to_vec(), "n={n}");
            for k in 2..=4 {
                assert_eq!(
                    is_kfree_naive(n, k),
                    arith::is_kfree(&f, k).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
        assert_eq!(gcd_naive(0, 9), 9);
        assert_eq!(gcd_naive(12, 18), 6);
        assert_eq!(largest_prime_naive(1), 1);
        assert_eq!(largest_prime_naive(2 * 3 * 49), 7);
    }

    #[test]
    fn every_scan_matches_its_reference_at_x_300() {
        let cfg = RunConfig::default();
        let x = 300u64;
        let reports = vec![
            experiments::scan_conjecture(x, 2, &cfg).unwrap().to_report().unwrap(),
            experiments::scan_kfree_density(x, 3, &cfg).unwrap().to_report().unwrap(),
            experiments::scan_small_divisor_rate(x, 0.1, &cfg).unwrap().to_report(),
            experiments::scan_gcd_smoothness(x, &cfg).unwrap().to_report(),
            experiments::scan_close_prime_pairs(x, &cfg).unwrap().to_report(),
            experiments::scan_wirsing_popularity(x, &cfg, &WirsingOptions::default())
                .unwrap()
                .to_report(),
            experiments::scan_pomerance_deficiency(x, -1, 4, &cfg).unwrap().to_report(),
            experiments::scan_exceptional_set(x, &cfg).unwrap().to_report(),
            experiments::scan_divisor_tail(x, 2, &cfg).unwrap().to_report(),
        ];
        for report in reports {
            let diffs = diff_against_reference(&report);
            assert!(
                diffs.is_empty(),
                "{}: {}",
                report.statistic,
                diffs.join("; ")
            );
        }
    }

    #[test]
    fn tampered_counts_are_reported() {
        let cfg = RunConfig::default();
        let mut report = experiments::scan_conjecture(200, 2, &cfg)
            .unwrap()
            .to_report()
            .unwrap();
        *report.counts.get_mut("n_kfree").unwrap() += 1;
        let diffs = diff_against_reference(&report);
        assert!(diffs.iter().any(|d| d.contains("n_kfree")), "{diffs:?}");
    }

    #[test]
    fn unknown_statistics_are_rejected() {
        let report = ExperimentReport::new("made-up", 100);
        let diffs = diff_against_reference(&report);
        assert_eq!(diffs.len(), 1);
        assert!(diffs[0].contains("made-up"));
    }
}
