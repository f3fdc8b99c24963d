//! Tail of the k-th-power divisors of s(n) = sigma(n) - n: how often some
//! prime power p^k | s(n) exceeds y = (log log x)^y_exponent, split at
//! exp(log x / (2 log log log x)) into a "small" and a "large" range, with
//! parallel counts restricted to the n outside the exceptional set.

use crate::report::ExperimentReport;
use crate::sieve::{self, SegmentNeeds};
use crate::util::gcd;

use super::exceptional::{profile_from_slice, ConditionThresholds};
use super::{
    fold_segments, kth_power_divisors, largest_prime_with, scan_prime_list, IteratedLogs,
    Result, RunConfig, ScanError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorTail {
    pub x: u64,
    pub k: u32,
    pub y_exponent: f64,
    /// Threshold y: only p^k > y count as tail divisors.
    pub y: f64,
    /// Boundary exp(log x / (2 log3 x)) between the small and large range.
    pub bucket_split: f64,
    /// n with some p^k | s(n), p^k > y.
    pub count_any: u64,
    /// n with such a p^k in (y, bucket_split].
    pub count_small: u64,
    /// n with such a p^k above bucket_split. One n can land in both ranges.
    pub count_large: u64,
    pub count_any_nonexceptional: u64,
    pub count_small_nonexceptional: u64,
    pub count_large_nonexceptional: u64,
}

impl DivisorTail {
    fn empty(x: u64, k: u32, y_exponent: f64, y: f64, bucket_split: f64) -> Self {
        Self {
            x,
            k,
            y_exponent,
            y,
            bucket_split,
            count_any: 0,
            count_small: 0,
            count_large: 0,
            count_any_nonexceptional: 0,
            count_small_nonexceptional: 0,
            count_large_nonexceptional: 0,
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        debug_assert_eq!((self.x, self.k), (other.x, other.k));
        self.count_any += other.count_any;
        self.count_small += other.count_small;
        self.count_large += other.count_large;
        self.count_any_nonexceptional += other.count_any_nonexceptional;
        self.count_small_nonexceptional += other.count_small_nonexceptional;
        self.count_large_nonexceptional += other.count_large_nonexceptional;
        self
    }

    pub fn density_any(&self) -> f64 {
        self.count_any as f64 / self.x as f64
    }

    pub fn density_any_nonexceptional(&self) -> f64 {
        self.count_any_nonexceptional as f64 / self.x as f64
    }

    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("divisor-tail", self.x)
            .with_param("k", self.k)
            .with_param("y_exponent", self.y_exponent)
            .with_count("count_any", self.count_any)
            .with_count("count_small", self.count_small)
            .with_count("count_large", self.count_large)
            .with_count("count_any_nonexceptional", self.count_any_nonexceptional)
            .with_count("count_small_nonexceptional", self.count_small_nonexceptional)
            .with_count("count_large_nonexceptional", self.count_large_nonexceptional)
            .with_density("density_any", self.density_any())
            .with_density("density_any_nonexceptional", self.density_any_nonexceptional())
            .with_reference("y", self.y)
            .with_reference("bucket_split", self.bucket_split)
    }
}

/// Scans n in [2, x] (s(1) = 0 has no prime divisors, so n = 1 is skipped)
/// and tallies the tail divisors of s(n).
pub fn scan_divisor_tail(x: u64, k: u32, cfg: &RunConfig) -> Result<DivisorTail> {
    if k < 2 {
        return Err(ScanError::Domain(format!(
            "divisor tail needs k >= 2, got {k}"
        )));
    }
    let logs = IteratedLogs::with_y_exponent(x, cfg.y_exponent)?;
    cfg.validate()?;
    let y = logs.y();
    let bucket_split = (logs.log_x() / (2.0 * logs.log3_x())).exp();
    let th = ConditionThresholds::new(&logs);
    let primes = scan_prime_list(x);
    let spf = sieve::build_spf_table(x.min(1 << 20))?;
    let needs = SegmentNeeds {
        sigma: true,
        factors: true,
        ..Default::default()
    };
    let empty = DivisorTail::empty(x, k, logs.y_exponent(), y, bucket_split);
    fold_segments(
        x,
        needs,
        cfg,
        &primes,
        empty,
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let fs = seg.factors.as_ref().unwrap();
            let mut acc = empty;
            for (i, &sg) in sigma.iter().enumerate() {
                let n = seg.lo + i as u64;
                let s = sg - n;
                let mut any = false;
                let mut small = false;
                let mut large = false;
                for &(_, pk) in &kth_power_divisors(s, k, &primes)? {
                    let v = pk as f64;
                    if v > y {
                        any = true;
                        if v <= bucket_split {
                            small = true;
                        } else {
                            large = true;
                        }
                    }
                }
                if !any {
                    continue;
                }
                acc.count_any += 1;
                acc.count_small += u64::from(small);
                acc.count_large += u64::from(large);
                let g = gcd(n, sg);
                let gp = largest_prime_with(g, &spf, &primes)?;
                let profile = profile_from_slice(n, fs.factor_slice(n)?, gp, &th);
                if !profile.is_exceptional() {
                    acc.count_any_nonexceptional += 1;
                    acc.count_small_nonexceptional += u64::from(small);
                    acc.count_large_nonexceptional += u64::from(large);
                }
            }
            Ok(acc)
        },
        DivisorTail::merge,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    #[test]
    fn matches_direct_classification_when_y_below_four() {
        // at x = 100, y ~ 1.46 < 4 <= p^2, so "some p^2 > y divides s(n)"
        // is exactly "s(n) is not squarefree"; the split ~ 230 exceeds
        // max s(n) = 156, so nothing lands in the large range
        let t = scan_divisor_tail(100, 2, &RunConfig::default()).unwrap();
        let mut expect = 0u64;
        for n in 2..=100u64 {
            let s = arith::aliquot(n).unwrap();
            if s > 0 {
                let sf = arith::factorize(s).unwrap();
                if !arith::is_kfree(&sf, 2).unwrap() {
                    expect += 1;
                }
            }
        }
        assert_eq!(t.count_any, expect);
        assert_eq!(t.count_small, expect);
        assert_eq!(t.count_large, 0);
    }

    #[test]
    fn nonexceptional_counts_vanish_when_everything_is_exceptional() {
        use super::super::exceptional::scan_exceptional_set;
        let e = scan_exceptional_set(100, &RunConfig::default()).unwrap();
        assert_eq!(e.count_exceptional, 100);
        let t = scan_divisor_tail(100, 2, &RunConfig::default()).unwrap();
        assert_eq!(t.count_any_nonexceptional, 0);
        assert_eq!(t.count_small_nonexceptional, 0);
        assert_eq!(t.count_large_nonexceptional, 0);
    }

    #[test]
    fn higher_k_never_finds_more_tails() {
        // any p^3 | s with p^3 > y forces p^2 | s with p^2 >= 4 > y here
        let t2 = scan_divisor_tail(2000, 2, &RunConfig::default()).unwrap();
        let t3 = scan_divisor_tail(2000, 3, &RunConfig::default()).unwrap();
        assert!(t3.count_any <= t2.count_any);
        assert!(t3.count_any > 0);
    }

    #[test]
    fn counts_are_consistent() {
        let t = scan_divisor_tail(3000, 2, &RunConfig::default()).unwrap();
        assert!(t.count_small <= t.count_any);
        assert!(t.count_large <= t.count_any);
        assert!(t.count_small + t.count_large >= t.count_any);
        assert!(t.count_any_nonexceptional <= t.count_any);
        assert!(t.count_any <= t.x);
        let cfg = RunConfig {
            segment_len: 611,
            ..Default::default()
        };
        assert_eq!(scan_divisor_tail(3000, 2, &cfg).unwrap(), t);
    }

    #[test]
    fn y_exponent_is_honored() {
        let lo = RunConfig {
            y_exponent: 0.1,
            ..Default::default()
        };
        let t = scan_divisor_tail(5000, 2, &lo).unwrap();
        let logs = IteratedLogs::with_y_exponent(5000, 0.1).unwrap();
        assert_eq!(t.y, logs.y());
        assert_eq!(t.y_exponent, 0.1);
    }

    #[test]
    fn domain_checks() {
        assert!(scan_divisor_tail(99, 2, &RunConfig::default()).is_err());
        assert!(scan_divisor_tail(1000, 1, &RunConfig::default()).is_err());
    }

    #[test]
    fn report_shape() {
        let r = scan_divisor_tail(500, 4, &RunConfig::default())
            .unwrap()
            .to_report();
        assert_eq!(r.statistic, "divisor-tail");
        assert!(r.params.contains_key("k"));
        assert!(r.params.contains_key("y_exponent"));
        for key in [
            "count_any",
            "count_small",
            "count_large",
            "count_any_nonexceptional",
            "count_small_nonexceptional",
            "count_large_nonexceptional",
        ] {
            assert!(r.counts.contains_key(key), "missing {key}");
        }
        assert!(r.references.contains_key("y"));
        assert!(r.references.contains_key("bucket_split"));
    }
}
