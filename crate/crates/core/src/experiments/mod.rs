//! Segmented scans over [1, x]. Every statistic folds a mergeable
//! accumulator over sieve windows; merges are associative and commutative
//! and densities are derived from integer counts only after the final merge,
//! so results are independent of segment length and thread count by
//! construction.

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::sieve::{self, SieveError, SpfTable};
use crate::util::isqrt;

pub mod close_pairs;
pub mod conjecture;
pub mod divisor_tail;
pub mod exceptional;
pub mod gcd_smooth;
pub mod kfree;
pub mod pomerance;
pub mod small_divisors;
pub mod wirsing;

pub use close_pairs::{scan_close_prime_pairs, ClosePairCounts};
pub use conjecture::{scan_conjecture, EquivalenceCounts};
pub use divisor_tail::{scan_divisor_tail, DivisorTail};
pub use exceptional::{exceptional_profile, scan_exceptional_set, ExceptionalCounts, ExceptionalProfile};
pub use gcd_smooth::{scan_gcd_smoothness, GcdSmoothness};
pub use kfree::{scan_kfree_density, KfreeDensity};
pub use pomerance::{scan_pomerance_deficiency, PomeranceDeficiency};
pub use small_divisors::{scan_small_divisor_rate, SmallDivisorRate};
pub use wirsing::{
    scan_wirsing_popularity, wirsing_recount, WirsingOptions, WirsingPopularity,
    ARGMAX_REPORT_CAP,
};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit: {0}")]
    Resource(String),
    /// An internal cross-check failed; the run's output cannot be trusted.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, ScanError>;

pub const DEFAULT_Y_EXPONENT: f64 = 0.9;

/// The iterated natural logarithms of x and the tail threshold
/// y = (log log x)^y_exponent. Requires x >= 100 so that even the third
/// log is defined and positive (log log 100 ~ 1.53).
#[derive(Debug, Clone, Copy)]
pub struct IteratedLogs {
    x: u64,
    y_exponent: f64,
    log_x: f64,
    log2_x: f64,
    log3_x: f64,
    y: f64,
}

impl IteratedLogs {
    pub fn new(x: u64) -> Result<Self> {
        Self::with_y_exponent(x, DEFAULT_Y_EXPONENT)
    }

    pub fn with_y_exponent(x: u64, y_exponent: f64) -> Result<Self> {
        if x < 100 {
            return Err(ScanError::Domain(format!(
                "iterated logs need x >= 100 (log log log x must stay positive), got x = {x}"
            )));
        }
        if !(y_exponent > 0.0 && y_exponent < 1.0) {
            return Err(ScanError::Domain(format!(
                "y exponent must lie in (0, 1), got {y_exponent}"
            )));
        }
        let log_x = (x as f64).ln();
        let log2_x = log_x.ln();
        let log3_x = log2_x.ln();
        Ok(Self {
            x,
            y_exponent,
            log_x,
            log2_x,
            log3_x,
            y: log2_x.powf(y_exponent),
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y_exponent(&self) -> f64 {
        self.y_exponent
    }

    /// Natural log of x.
    pub fn log_x(&self) -> f64 {
        self.log_x
    }

    /// log log x.
    pub fn log2_x(&self) -> f64 {
        self.log2_x
    }

    /// log log log x.
    pub fn log3_x(&self) -> f64 {
        self.log3_x
    }

    /// Tail threshold (log log x)^y_exponent.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// x / log x, the scale that separates "small" n from the bulk.
    pub fn x_over_log_x(&self) -> f64 {
        self.x as f64 / self.log_x
    }
}

/// Execution shape of a scan. Affects speed and memory only: results are
/// byte-identical across every choice of threads and segment length.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Worker threads; 0 means the default rayon pool.
    pub threads: usize,
    pub segment_len: u64,
    /// Exponent of the divisor-tail threshold y.
    pub y_exponent: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            threads: 0,
            segment_len: sieve::DEFAULT_SEGMENT_LEN,
            y_exponent: DEFAULT_Y_EXPONENT,
        }
    }
}

impl RunConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.segment_len == 0 {
            return Err(ScanError::Domain("segment length cannot be 0".into()));
        }
        if self.segment_len > sieve::MAX_SEGMENT_LEN {
            return Err(ScanError::Resource(format!(
                "segment length {} exceeds the {} cap",
                self.segment_len,
                sieve::MAX_SEGMENT_LEN
            )));
        }
        if !(self.y_exponent > 0.0 && self.y_exponent < 1.0) {
            return Err(ScanError::Domain(format!(
                "y exponent must lie in (0, 1), got {}",
                self.y_exponent
            )));
        }
        Ok(())
    }
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ScanError::Resource(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Splits [2, x] into windows of `cfg.segment_len`, builds the requested
/// per-window data, and folds `work` over the windows. `merge` must be
/// associative and commutative with `empty` as identity; the fold order is
/// unspecified.
pub(crate) fn fold_segments<A, W, M>(
    x: u64,
    needs: sieve::SegmentNeeds,
    cfg: &RunConfig,
    primes: &[u64],
    empty: A,
    work: W,
    merge: M,
) -> Result<A>
where
    A: Send + Sync + Clone,
    W: Fn(&sieve::SegmentData) -> Result<A> + Sync,
    M: Fn(A, A) -> A + Sync + Send,
{
    cfg.validate()?;
    if x < 2 {
        return Ok(empty);
    }
    let mut bounds: Vec<(u64, u64)> = Vec::new();
    let mut lo = 2u64;
    while lo <= x {
        let hi = (lo.saturating_add(cfg.segment_len)).min(x + 1);
        bounds.push((lo, hi));
        lo = hi;
    }
    with_pool(cfg.threads, || {
        bounds
            .par_iter()
            .map(|&(lo, hi)| {
                let data = sieve::build_segment(lo, hi, primes, needs)?;
                work(&data)
            })
            .try_reduce(|| empty.clone(), |a, b| Ok(merge(a, b)))
    })?
}

/// Primes sufficient both to sieve [2, x] and to trial-factor every aliquot
/// value s(n) with n <= x: sigma(n) <= n * H_n < x (1 + ln x).
pub(crate) fn scan_prime_list(x: u64) -> Vec<u64> {
    let smax = (x as f64) * (1.0 + (x as f64).ln());
    sieve::sieve_primes(isqrt(smax as u64) + 1)
}

/// Reference value of 1/zeta(k), to a tolerance far below every acceptance
/// threshold while staying cheap (k = 2 needs primes to ~2.3e7).
pub(crate) fn zeta_reference(k: u32) -> Result<f64> {
    let eps = if k == 2 { 1e-7 } else { 1e-9 };
    Ok(arith::zeta_reciprocal(k, eps)?)
}

/// k-freeness of an arbitrary value (s(n) ranges past the sieve window) by
/// ascending trial division. Sound early exit: once p^k exceeds the
/// remaining cofactor m, any undiscovered prime q > p would need q^k <= m.
pub(crate) fn kfree_value(mut m: u64, k: u32, primes: &[u64]) -> Result<bool> {
    debug_assert!(k >= 2);
    for &p in primes {
        let pk = match p.checked_pow(k) {
            Some(v) => v,
            None => break,
        };
        if pk > m {
            return Ok(true);
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e >= k {
                return Ok(false);
            }
        }
    }
    let last = primes.last().copied().unwrap_or(1);
    if last.checked_pow(k).map_or(true, |pk| pk <= m) {
        return Err(ScanError::Invariant(format!(
            "prime list (up to {last}) too short to classify {m} as {k}-free"
        )));
    }
    Ok(true)
}

/// The primes p with p^k | m, paired with p^k, ascending. Same early-exit
/// contract as [`kfree_value`].
pub(crate) fn kth_power_divisors(
    mut m: u64,
    k: u32,
    primes: &[u64],
) -> Result<Vec<(u64, u64)>> {
    debug_assert!(k >= 2);
    let mut out = Vec::new();
    for &p in primes {
        let pk = match p.checked_pow(k) {
            Some(v) => v,
            None => break,
        };
        if pk > m {
            return Ok(out);
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e >= k {
                out.push((p, pk));
            }
        }
    }
    let last = primes.last().copied().unwrap_or(1);
    if last.checked_pow(k).map_or(true, |pk| pk <= m) {
        return Err(ScanError::Invariant(format!(
            "prime list (up to {last}) too short to split {m} into {k}-th powers"
        )));
    }
    Ok(out)
}

/// Largest prime factor of m, via the dense table when m is small enough and
/// trial division by `primes` (complete to sqrt(m)) otherwise.
pub(crate) fn largest_prime_with(m: u64, spf: &SpfTable, primes: &[u64]) -> Result<u64> {
    if m <= 1 {
        return Ok(1);
    }
    if m <= spf.limit() {
        return Ok(spf.largest_prime_factor(m)?);
    }
    let mut m = m;
    let mut big = 1u64;
    for &p in primes {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            big = big.max(p);
            while m % p == 0 {
                m /= p;
            }
            if m > 1 && m <= spf.limit() {
                big = big.max(spf.largest_prime_factor(m)?);
                m = 1;
                break;
            }
        }
    }
    if m > 1 {
        // every divisor candidate <= sqrt(m) is exhausted, so m is prime
        big = big.max(m);
    }
    Ok(big)
}
