//! Smoothness of gcd(n, sigma(n)): how often its largest prime factor stays
//! below log log x, with a power-of-two histogram of that largest prime.

use crate::report::ExperimentReport;
use crate::sieve::{build_spf_table, SegmentNeeds};
use crate::util::gcd;

use super::{
    fold_segments, largest_prime_with, scan_prime_list, IteratedLogs, Result, RunConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GcdSmoothness {
    pub x: u64,
    /// Smoothness bound log log x.
    pub threshold: f64,
    /// n with P+(gcd(n, sigma(n))) <= threshold.
    pub count_smooth: u64,
    pub count_violation: u64,
    /// Bucket 0 counts gcds with no prime factor (gcd = 1); bucket i >= 1
    /// counts largest primes in (2^(i-1), 2^i].
    pub histogram: Vec<u64>,
}

/// Bucket index of a largest-prime value.
fn bucket_of(p: u64) -> usize {
    if p == 1 {
        0
    } else {
        (64 - (p - 1).leading_zeros()) as usize
    }
}

fn bucket_count(x: u64) -> usize {
    bucket_of(x) + 1
}

/// Histogram rendering used in reports: "1:c0 2:c1 4:c2 ...", where the
/// label is the bucket's upper bound.
pub fn format_histogram(hist: &[u64]) -> String {
    hist.iter()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 {
                format!("1:{c}")
            } else {
                format!("{}:{c}", 1u128 << i)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl GcdSmoothness {
    pub fn smooth_rate(&self) -> f64 {
        self.count_smooth as f64 / self.x as f64
    }

    pub fn violation_rate(&self) -> f64 {
        self.count_violation as f64 / self.x as f64
    }

    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("gcd-smooth", self.x)
            .with_count("count_smooth", self.count_smooth)
            .with_count("count_violation", self.count_violation)
            .with_density("rate_smooth", self.smooth_rate())
            .with_density("rate_violation", self.violation_rate())
            .with_reference("threshold_log2x", self.threshold)
            .with_detail("pmax_histogram", format_histogram(&self.histogram))
    }
}

#[derive(Clone)]
struct Acc {
    smooth: u64,
    violation: u64,
    hist: Vec<u64>,
}

impl Acc {
    fn empty(buckets: usize) -> Self {
        Self {
            smooth: 0,
            violation: 0,
            hist: vec![0; buckets],
        }
    }

    fn merge(mut self, o: Self) -> Self {
        debug_assert_eq!(self.hist.len(), o.hist.len());
        self.smooth += o.smooth;
        self.violation += o.violation;
        for (a, b) in self.hist.iter_mut().zip(&o.hist) {
            *a += b;
        }
        self
    }
}

/// Scans n in [1, x]; n = 1 contributes gcd(1, 1) = 1, which is smooth.
pub fn scan_gcd_smoothness(x: u64, cfg: &RunConfig) -> Result<GcdSmoothness> {
    let logs = IteratedLogs::with_y_exponent(x, cfg.y_exponent)?;
    let threshold = logs.log2_x();
    let primes = scan_prime_list(x);
    let spf = build_spf_table(x.min(1 << 20))?;
    let buckets = bucket_count(x);
    let needs = SegmentNeeds {
        sigma: true,
        ..Default::default()
    };
    let mut acc = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        Acc::empty(buckets),
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let mut acc = Acc::empty(buckets);
            for (i, &sg) in sigma.iter().enumerate() {
                let n = seg.lo + i as u64;
                let g = gcd(n, sg);
                let pmax = largest_prime_with(g, &spf, &primes)?;
                if pmax as f64 <= threshold {
                    acc.smooth += 1;
                } else {
                    acc.violation += 1;
                }
                acc.hist[bucket_of(pmax)] += 1;
            }
            Ok(acc)
        },
        Acc::merge,
    )?;
    acc.smooth += 1; // n = 1: gcd(1, sigma(1)) = 1
    acc.hist[0] += 1;
    Ok(GcdSmoothness {
        x,
        threshold,
        count_smooth: acc.smooth,
        count_violation: acc.violation,
        histogram: acc.hist,
    })
}
