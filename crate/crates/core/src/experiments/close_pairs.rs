//! Multiplicative structure near the top: n carrying two prime factors that
//! are large and multiplicatively close to each other.
//!
//! A pair (q1, q2) counts when x^(1/(10 log3 x)) < q1 <= x and
//! q1 * x^(-1/(log3 x)^2) <= q2 <= q1. Both primes divide n; q2 = q1 is
//! allowed exactly when q1^2 | n. The distinct-prime reading (q2 < q1) is
//! tallied separately.

use crate::report::ExperimentReport;
use crate::sieve::SegmentNeeds;

use super::{fold_segments, scan_prime_list, IteratedLogs, Result, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosePairCounts {
    pub x: u64,
    /// Lower bound for q1: x^(1/(10 log3 x)).
    pub q1_lower: f64,
    /// Window ratio for q2: x^(-1/(log3 x)^2) < 1.
    pub q2_ratio: f64,
    /// 1 / log3 x, the comparator scale for the densities.
    pub comparator: f64,
    /// n admitting a pair, repeated primes allowed (q2 = q1 needs q1^2 | n).
    pub count_pairs: u64,
    /// n admitting a pair of distinct primes.
    pub count_distinct: u64,
}

impl ClosePairCounts {
    pub fn pair_density(&self) -> f64 {
        self.count_pairs as f64 / self.x as f64
    }

    pub fn distinct_density(&self) -> f64 {
        self.count_distinct as f64 / self.x as f64
    }

    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("close-pairs", self.x)
            .with_count("count_pairs", self.count_pairs)
            .with_count("count_distinct_pairs", self.count_distinct)
            .with_density("density_pairs", self.pair_density())
            .with_density("density_distinct", self.distinct_density())
            .with_reference("q1_lower", self.q1_lower)
            .with_reference("q2_ratio", self.q2_ratio)
            .with_reference("comparator_inv_log3", self.comparator)
    }
}

/// Scans n in [1, x] by factored segments. For a fixed q1 the best q2
/// candidates are q1 itself (when q1^2 | n) and the next smaller prime
/// factor of n, so only adjacent factor pairs are inspected.
pub fn scan_close_prime_pairs(x: u64, cfg: &RunConfig) -> Result<ClosePairCounts> {
    let logs = IteratedLogs::with_y_exponent(x, cfg.y_exponent)?;
    let q1_lower = (logs.log_x() / (10.0 * logs.log3_x())).exp();
    let q2_ratio = (-logs.log_x() / (logs.log3_x() * logs.log3_x())).exp();
    let primes = scan_prime_list(x);
    let needs = SegmentNeeds {
        factors: true,
        ..Default::default()
    };
    let (count_pairs, count_distinct) = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        (0u64, 0u64),
        |seg| {
            let factors = seg.factors.as_ref().unwrap();
            let mut pairs = 0u64;
            let mut distinct = 0u64;
            for n in seg.lo..seg.hi {
                let fs = factors.factor_slice(n)?;
                let mut found_any = false;
                let mut found_distinct = false;
                for idx in (0..fs.len()).rev() {
                    let (q1, e1) = fs[idx];
                    if q1 as f64 <= q1_lower {
                        break;
                    }
                    let q2_min = q1 as f64 * q2_ratio;
                    if e1 >= 2 {
                        // q2 = q1 sits at the top of the window
                        found_any = true;
                    }
                    if idx > 0 {
                        let q2 = fs[idx - 1].0;
                        if q2 as f64 >= q2_min {
                            found_any = true;
                            found_distinct = true;
                        }
                    }
                    if found_any && found_distinct {
                        break;
                    }
                }
                if found_any {
                    pairs += 1;
                }
                if found_distinct {
                    distinct += 1;
                }
            }
            Ok((pairs, distinct))
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )?;
    Ok(ClosePairCounts {
        x,
        q1_lower,
        q2_ratio,
        comparator: 1.0 / logs.log3_x(),
        count_pairs,
        count_distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_implies_pair_and_bounds_hold() {
        let c = scan_close_prime_pairs(5000, &RunConfig::default()).unwrap();
        assert!(c.count_distinct <= c.count_pairs);
        assert!(c.count_pairs <= 5000);
        assert!(c.q2_ratio < 1.0 && c.q2_ratio > 0.0);
        assert!(c.q1_lower > 1.0);
    }

    #[test]
    fn brute_force_window() {
        // directly test every (q1, q2) pair on a small range
        let x = 3000u64;
        let c = scan_close_prime_pairs(x, &RunConfig::default()).unwrap();
        let logs = IteratedLogs::new(x).unwrap();
        let q1_lower = (logs.log_x() / (10.0 * logs.log3_x())).exp();
        let q2_ratio = (-logs.log_x() / (logs.log3_x() * logs.log3_x())).exp();
        let mut pairs = 0u64;
        let mut distinct = 0u64;
        for n in 1..=x {
            let f = crate::arith::factorize(n).unwrap();
            let fs = f.factors();
            let mut any = false;
            let mut dis = false;
            for &(q1, e1) in fs {
                if q1 as f64 <= q1_lower {
                    continue;
                }
                for &(q2, _) in fs {
                    if q2 > q1 {
                        continue;
                    }
                    if (q2 as f64) < q1 as f64 * q2_ratio {
                        continue;
                    }
                    if q2 == q1 {
                        if e1 >= 2 {
                            any = true;
                        }
                    } else {
                        any = true;
                        dis = true;
                    }
                }
            }
            if any {
                pairs += 1;
            }
            if dis {
                distinct += 1;
            }
        }
        assert_eq!(c.count_pairs, pairs);
        assert_eq!(c.count_distinct, distinct);
    }

    #[test]
    fn report_shape() {
        let c = scan_close_prime_pairs(300, &RunConfig::default()).unwrap();
        let r = c.to_report();
        assert_eq!(r.statistic, "close-pairs");
        assert_eq!(r.counts["count_pairs"], c.count_pairs);
        assert!(r.references["comparator_inv_log3"] > 0.0);
        assert!(scan_close_prime_pairs(99, &RunConfig::default()).is_err());
    }
}
