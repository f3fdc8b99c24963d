//! The six-condition typicality test: n in [1, x] is exceptional when it
//! fails any of six structural conditions on its size, powerful part, top
//! prime factors, and gcd with sigma(n). The scan counts failures per
//! condition and the size of the exceptional set.

use crate::arith;
use crate::report::ExperimentReport;
use crate::sieve::{self, SegmentNeeds};
use crate::util::gcd;

use super::{
    fold_segments, largest_prime_with, scan_prime_list, IteratedLogs, Result, RunConfig,
    ScanError,
};

/// Pass/fail of each condition for one n, in order:
/// 1. n > x / log x
/// 2. powerful part of n <= log log x
/// 3. P+(n) > exp(log x / (10 log log log x))
/// 4. the largest prime of n is unitary (exponent 1)
/// 5. P+(gcd(n, sigma(n))) <= log log x
/// 6. P+(n) > P2+(n) * exp(log x / (log log log x)^2)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExceptionalProfile {
    pub passes: [bool; 6],
}

impl ExceptionalProfile {
    /// n belongs to the exceptional set when any condition fails.
    pub fn is_exceptional(&self) -> bool {
        self.passes.iter().any(|&ok| !ok)
    }
}

/// Per-x thresholds shared by the six conditions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ConditionThresholds {
    x_over_log_x: f64,
    log2_x: f64,
    /// exp(log x / (10 log3 x)), the floor for "P+(n) is large".
    p_large: f64,
    /// exp(log x / (log3 x)^2), the gap required between P+(n) and P2+(n).
    spread: f64,
}

impl ConditionThresholds {
    pub(crate) fn new(logs: &IteratedLogs) -> Self {
        Self {
            x_over_log_x: logs.x_over_log_x(),
            log2_x: logs.log2_x(),
            p_large: (logs.log_x() / (10.0 * logs.log3_x())).exp(),
            spread: (logs.log_x() / (logs.log3_x() * logs.log3_x())).exp(),
        }
    }
}

/// Evaluates the six conditions from a factor slice (ascending primes), the
/// largest prime of gcd(n, sigma(n)), and the per-x thresholds. An empty
/// slice describes n = 1: no unitary top prime, P+(1) = P2+(1) = 1.
pub(crate) fn profile_from_slice(
    n: u64,
    fs: &[(u64, u8)],
    gcd_pmax: u64,
    th: &ConditionThresholds,
) -> ExceptionalProfile {
    let pmax = fs.last().map_or(1, |&(p, _)| p);
    let second = if fs.len() >= 2 { fs[fs.len() - 2].0 } else { 1 };
    let powerful: u64 = fs
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(p, e)| p.pow(e as u32))
        .product();
    let passes = [
        n as f64 > th.x_over_log_x,
        powerful as f64 <= th.log2_x,
        pmax as f64 > th.p_large,
        fs.last().is_some_and(|&(_, e)| e == 1),
        gcd_pmax as f64 <= th.log2_x,
        pmax as f64 > second as f64 * th.spread,
    ];
    ExceptionalProfile { passes }
}

/// One-off profile of a single n relative to scale x, 1 <= n <= x.
pub fn exceptional_profile(n: u64, x: u64) -> Result<ExceptionalProfile> {
    if n == 0 || n > x {
        return Err(ScanError::Domain(format!(
            "n must lie in [1, x], got n = {n}, x = {x}"
        )));
    }
    let logs = IteratedLogs::new(x)?;
    let th = ConditionThresholds::new(&logs);
    let f = arith::factorize(n)?;
    let sigma = arith::divisor_sigma(&f)?;
    let g = gcd(n, sigma);
    let gp = if g <= 1 {
        1
    } else {
        arith::factorize(g)?.largest_prime()
    };
    let fs: Vec<(u64, u8)> = f.factors().iter().map(|&(p, e)| (p, e as u8)).collect();
    Ok(profile_from_slice(n, &fs, gp, &th))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExceptionalCounts {
    pub x: u64,
    /// fail[i] counts the n failing condition i+1; one n can fail several.
    pub fail: [u64; 6],
    pub count_exceptional: u64,
}

impl ExceptionalCounts {
    fn empty(x: u64) -> Self {
        Self {
            x,
            fail: [0; 6],
            count_exceptional: 0,
        }
    }

    fn absorb(&mut self, profile: &ExceptionalProfile) {
        for (slot, &ok) in self.fail.iter_mut().zip(&profile.passes) {
            *slot += u64::from(!ok);
        }
        self.count_exceptional += u64::from(profile.is_exceptional());
    }

    pub fn merge(mut self, other: Self) -> Self {
        debug_assert_eq!(self.x, other.x);
        for (slot, add) in self.fail.iter_mut().zip(other.fail) {
            *slot += add;
        }
        self.count_exceptional += other.count_exceptional;
        self
    }

    pub fn density(&self) -> f64 {
        self.count_exceptional as f64 / self.x as f64
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut r = ExperimentReport::new("exceptional", self.x);
        for (i, &c) in self.fail.iter().enumerate() {
            r = r.with_count(&format!("fail_cond{}", i + 1), c);
        }
        r.with_count("count_exceptional", self.count_exceptional)
            .with_density("density_exceptional", self.density())
    }
}

/// Counts per-condition failures and exceptional n over [1, x].
pub fn scan_exceptional_set(x: u64, cfg: &RunConfig) -> Result<ExceptionalCounts> {
    let logs = IteratedLogs::new(x)?;
    cfg.validate()?;
    let th = ConditionThresholds::new(&logs);
    let primes = scan_prime_list(x);
    let spf = sieve::build_spf_table(x.min(1 << 20))?;
    let needs = SegmentNeeds {
        sigma: true,
        factors: true,
        ..Default::default()
    };
    let mut counts = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        ExceptionalCounts::empty(x),
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let fs = seg.factors.as_ref().unwrap();
            let mut acc = ExceptionalCounts::empty(x);
            for (i, &sg) in sigma.iter().enumerate() {
                let n = seg.lo + i as u64;
                let slice = fs.factor_slice(n)?;
                let g = gcd(n, sg);
                let gp = largest_prime_with(g, &spf, &primes)?;
                acc.absorb(&profile_from_slice(n, slice, gp, &th));
            }
            Ok(acc)
        },
        ExceptionalCounts::merge,
    )?;
    // n = 1: empty factorization, gcd(1, sigma(1)) = 1
    counts.absorb(&profile_from_slice(1, &[], 1, &th));
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_one_failures_count_small_n() {
        // failing condition 1 means n <= x / log x exactly
        let c = scan_exceptional_set(10_000, &RunConfig::default()).unwrap();
        let logs = IteratedLogs::new(10_000).unwrap();
        assert_eq!(c.fail[0], logs.x_over_log_x().floor() as u64);
        assert_eq!(c.fail[0], 1085);
    }

    #[test]
    fn small_scales_are_entirely_exceptional() {
        // below e^(e^e) the required top-prime gap exceeds x itself, so
        // condition 6 cannot hold and every n is exceptional
        let c = scan_exceptional_set(1000, &RunConfig::default()).unwrap();
        assert_eq!(c.count_exceptional, 1000);
        assert_eq!(c.fail[5], 1000);
    }

    #[test]
    fn scan_agrees_with_single_profiles() {
        let x = 300u64;
        let c = scan_exceptional_set(x, &RunConfig::default()).unwrap();
        let mut fail = [0u64; 6];
        let mut exceptional = 0u64;
        for n in 1..=x {
            let p = exceptional_profile(n, x).unwrap();
            for (slot, &ok) in fail.iter_mut().zip(&p.passes) {
                *slot += u64::from(!ok);
            }
            exceptional += u64::from(p.is_exceptional());
        }
        assert_eq!(c.fail, fail);
        assert_eq!(c.count_exceptional, exceptional);
    }

    #[test]
    fn segment_size_invariance() {
        let base = scan_exceptional_set(2000, &RunConfig::default()).unwrap();
        let cfg = RunConfig {
            segment_len: 397,
            ..Default::default()
        };
        assert_eq!(scan_exceptional_set(2000, &cfg).unwrap(), base);
    }

    #[test]
    fn large_prime_passes_all_conditions_at_its_own_scale() {
        // past e^(e^e) ~ 3.8e6 a prime n = x passes: it is its own huge
        // unitary top prime and gcd(n, n + 1) = 1
        let p = (10_000_001u64..).find(|&n| arith::is_prime(n)).unwrap();
        let prof = exceptional_profile(p, p).unwrap();
        assert_eq!(prof.passes, [true; 6]);
        assert!(!prof.is_exceptional());
    }

    #[test]
    fn n_equals_one_is_exceptional() {
        let prof = exceptional_profile(1, 1000).unwrap();
        assert_eq!(
            prof.passes,
            [false, true, false, false, true, false]
        );
        assert!(prof.is_exceptional());
    }

    #[test]
    fn perfect_number_fails_the_gcd_condition() {
        // gcd(6, sigma(6)) = 6 has top prime 3 > log log 300
        let prof = exceptional_profile(6, 300).unwrap();
        assert!(!prof.passes[4]);
    }

    #[test]
    fn domain_checks() {
        assert!(exceptional_profile(0, 1000).is_err());
        assert!(exceptional_profile(1001, 1000).is_err());
        assert!(scan_exceptional_set(99, &RunConfig::default()).is_err());
    }

    #[test]
    fn report_shape() {
        let c = scan_exceptional_set(500, &RunConfig::default()).unwrap();
        let r = c.to_report();
        assert_eq!(r.statistic, "exceptional");
        for i in 1..=6 {
            assert!(r.counts.contains_key(&format!("fail_cond{i}")));
        }
        assert!(r.counts.contains_key("count_exceptional"));
        assert!((r.densities["density_exceptional"] - 1.0).abs() < 1e-9);
    }
}
