//! How often sigma(n) is divisible by every small integer at once: the rate
//! of L | sigma(n) for L = lcm(1..=floor((log log x)^(1-eps))).

use crate::report::ExperimentReport;
use crate::sieve::SegmentNeeds;
use crate::util::gcd;

use super::{fold_segments, scan_prime_list, IteratedLogs, Result, RunConfig, ScanError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDivisorRate {
    pub x: u64,
    pub eps: f64,
    /// floor((log log x)^(1 - eps)).
    pub threshold: u64,
    /// lcm(1..=threshold).
    pub lcm: u64,
    /// Number of n in [1, x] with lcm | sigma(n).
    pub count_divisible: u64,
}

impl SmallDivisorRate {
    pub fn rate(&self) -> f64 {
        self.count_divisible as f64 / self.x as f64
    }

    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("small-divisors", self.x)
            .with_param("eps", self.eps)
            .with_count("threshold", self.threshold)
            .with_count("lcm", self.lcm)
            .with_count("count_divisible", self.count_divisible)
            .with_density("rate", self.rate())
    }
}

fn lcm_up_to(t: u64) -> Result<u64> {
    let mut l = 1u64;
    for d in 2..=t {
        let g = gcd(l, d);
        l = (l / g).checked_mul(d).ok_or_else(|| {
            ScanError::Resource(format!("lcm(1..={t}) exceeds u64"))
        })?;
    }
    Ok(l)
}

/// Counts n <= x with lcm(1..=floor((log log x)^(1-eps))) dividing sigma(n).
/// n = 1 participates: sigma(1) = 1 is divisible only by lcm = 1.
pub fn scan_small_divisor_rate(x: u64, eps: f64, cfg: &RunConfig) -> Result<SmallDivisorRate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ScanError::Domain(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let logs = IteratedLogs::with_y_exponent(x, cfg.y_exponent)?;
    let threshold = logs.log2_x().powf(1.0 - eps).floor() as u64;
    let lcm = lcm_up_to(threshold)?;
    let primes = scan_prime_list(x);
    let needs = SegmentNeeds {
        sigma: true,
        ..Default::default()
    };
    let mut count = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        0u64,
        |seg| {
            Ok(seg
                .sigma
                .as_ref()
                .unwrap()
                .iter()
                .filter(|&&s| s % lcm == 0)
                .count() as u64)
        },
        |a, b| a + b,
    )?;
    if 1 % lcm == 0 {
        count += 1; // n = 1
    }
    Ok(SmallDivisorRate {
        x,
        eps,
        threshold,
        lcm,
        count_divisible: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_up_to(0).unwrap(), 1);
        assert_eq!(lcm_up_to(1).unwrap(), 1);
        assert_eq!(lcm_up_to(2).unwrap(), 2);
        assert_eq!(lcm_up_to(6).unwrap(), 60);
        assert_eq!(lcm_up_to(10).unwrap(), 2520);
        assert!(lcm_up_to(60).is_err());
    }

    #[test]
    fn threshold_below_two_gives_rate_one() {
        // log log 100 = 1.527..., so with eps = 0.1 the threshold is 1 and
        // the lcm is 1: everything is divisible
        let r = scan_small_divisor_rate(100, 0.1, &RunConfig::default()).unwrap();
        assert_eq!(r.threshold, 1);
        assert_eq!(r.lcm, 1);
        assert_eq!(r.count_divisible, 100);
        assert_eq!(r.rate(), 1.0);
    }

    #[test]
    fn million_threshold_catches_odd_sigma() {
        // at x = 10^6 the threshold is 2, so the count excludes exactly the
        // n with odd sigma: squares and twice-squares
        let r = scan_small_divisor_rate(1_000_000, 0.1, &RunConfig::default()).unwrap();
        assert_eq!(r.threshold, 2);
        assert_eq!(r.lcm, 2);
        assert_eq!(r.count_divisible, 1_000_000 - 1000 - 707);
    }

    #[test]
    fn domain_checks() {
        assert!(scan_small_divisor_rate(50, 0.1, &RunConfig::default()).is_err());
        assert!(scan_small_divisor_rate(1000, 0.0, &RunConfig::default()).is_err());
        assert!(scan_small_divisor_rate(1000, 1.0, &RunConfig::default()).is_err());
    }
}
