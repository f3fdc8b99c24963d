//! Segmented sieves: divisor sums, factorizations and k-free flags over
//! half-open windows [lo, hi), plus prime lists and a smallest-prime-factor
//! table for dense small-n lookups.

use thiserror::Error;

use crate::arith::{ArithError, Factorization};
use crate::util::{iroot, isqrt};

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit: {0}")]
    Resource(String),
    /// The caller's prime list does not cover the range the sieve needs.
    #[error("incomplete prime list: need all primes up to {need}, list ends at {have}")]
    IncompletePrimes { need: u64, have: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, SieveError>;

/// Default window length for segmented scans.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;
/// Hard cap on a single window; one segment must stay cache- and RAM-friendly.
pub const MAX_SEGMENT_LEN: u64 = 1 << 26;
/// Upper bound accepted for `hi`. sigma(n) < 7.2 n for n below this bound, so
/// every intermediate product in the sigma accumulation fits in u64 with room
/// to spare.
pub const MAX_SIEVE_HI: u64 = 333_333_333_333_333_333;

/// All primes <= bound, ascending. Odd-only bit sieve; ~bound/16 bytes.
pub fn sieve_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let half = (n - 1) / 2; // index i represents the odd number 2i + 1
    let mut comp = vec![0u64; half / 64 + 1];
    let is_comp = |c: &[u64], i: usize| c[i >> 6] >> (i & 63) & 1 == 1;
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !is_comp(&comp, i) {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= half {
                comp[j >> 6] |= 1 << (j & 63);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2u64];
    for i in 1..=half {
        if !is_comp(&comp, i) {
            primes.push((2 * i + 1) as u64);
        }
    }
    primes
}

/// Fixed-length bit vector that starts with every bit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn all_set(len: usize) -> Self {
        let mut words = vec![!0u64; len.div_ceil(64)];
        // mask the tail so popcounts see only real bits
        if len % 64 != 0 {
            if let Some(w) = words.last_mut() {
                *w = (1u64 << (len % 64)) - 1;
            }
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    pub fn count_set(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Smallest-prime-factor table over 0..=limit (linear sieve, 4 bytes/entry).
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

/// Default memory budget for [`build_spf_table`]: 512 MiB.
pub const DEFAULT_SPF_BUDGET_BYTES: u64 = 1 << 29;

pub fn build_spf_table(limit: u64) -> Result<SpfTable> {
    build_spf_table_with_budget(limit, DEFAULT_SPF_BUDGET_BYTES)
}

pub fn build_spf_table_with_budget(limit: u64, max_bytes: u64) -> Result<SpfTable> {
    if limit < 2 {
        return Err(SieveError::Domain(format!(
            "spf table needs limit >= 2, got {limit}"
        )));
    }
    if limit >= u32::MAX as u64 {
        return Err(SieveError::Domain(format!(
            "spf table entries are u32; limit {limit} is out of range"
        )));
    }
    let bytes = 4 * (limit + 1);
    if bytes > max_bytes {
        return Err(SieveError::Resource(format!(
            "spf table for limit {limit} needs {bytes} bytes, budget is {max_bytes}"
        )));
    }
    let n = limit as usize + 1;
    let mut spf = vec![0u32; n];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            if p > spf[i] || i * p as usize >= n {
                break;
            }
            spf[i * p as usize] = p;
        }
    }
    Ok(SpfTable { limit, spf })
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(SieveError::Domain(format!(
                "spf lookup for {n} outside [2, {}]",
                self.limit
            )));
        }
        Ok(self.spf[n as usize] as u64)
    }

    /// Largest prime factor by repeated division; 1 maps to 1.
    pub fn largest_prime_factor(&self, n: u64) -> Result<u64> {
        if n == 1 {
            return Ok(1);
        }
        if n < 2 || n > self.limit {
            return Err(SieveError::Domain(format!(
                "lookup for {n} outside [1, {}]",
                self.limit
            )));
        }
        let mut m = n as usize;
        let mut big = 1u64;
        while m > 1 {
            let p = self.spf[m] as u64;
            big = p;
            while m as u64 % p == 0 {
                m /= p as usize;
            }
        }
        Ok(big)
    }

    /// Full factorization by walking the table; agrees with `arith::factorize`.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 || n > self.limit {
            return Err(SieveError::Domain(format!(
                "factorize lookup for {n} outside [1, {}]",
                self.limit
            )));
        }
        let mut factors = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as u64;
            let mut e = 0u32;
            while m as u64 % p == 0 {
                m /= p as usize;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(Factorization::new_unchecked(n, factors))
    }
}

/// One sieved window: divisor sums for every n in [lo, hi), and optionally
/// the k-free flag bitset for one k.
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    /// sigma(lo + i) at index i.
    pub sigma: Vec<u64>,
    pub kfree: Option<(u32, Bitset)>,
}

/// Per-segment factorizations in compressed sparse rows:
/// `entries[offsets[i]..offsets[i+1]]` holds the (prime, exponent) pairs of
/// lo + i with primes ascending.
pub struct SegmentFactors {
    lo: u64,
    hi: u64,
    offsets: Vec<u32>,
    entries: Vec<(u64, u8)>,
}

impl SegmentFactors {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn factor_slice(&self, n: u64) -> Result<&[(u64, u8)]> {
        if n < self.lo || n >= self.hi {
            return Err(SieveError::Domain(format!(
                "{n} outside segment [{}, {})",
                self.lo, self.hi
            )));
        }
        let i = (n - self.lo) as usize;
        Ok(&self.entries[self.offsets[i] as usize..self.offsets[i + 1] as usize])
    }
}

/// Rebuilds the `Factorization` of one segment member; equal to
/// `arith::factorize(n)` whenever n lies in the segment.
pub fn factorize_in_segment(n: u64, seg: &SegmentFactors) -> Result<Factorization> {
    let fs = seg.factor_slice(n)?;
    Ok(Factorization::new_unchecked(
        n,
        fs.iter().map(|&(p, e)| (p, e as u32)).collect(),
    ))
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct SegmentNeeds {
    pub sigma: bool,
    pub factors: bool,
    pub kfree: Option<u32>,
}

pub(crate) struct SegmentData {
    pub lo: u64,
    pub hi: u64,
    pub sigma: Option<Vec<u64>>,
    pub factors: Option<SegmentFactors>,
    pub kfree: Option<Bitset>,
}

fn check_bounds(lo: u64, hi: u64) -> Result<()> {
    if lo < 2 {
        return Err(SieveError::Domain(format!(
            "segments start at 2 or above, got lo = {lo}"
        )));
    }
    if hi <= lo {
        return Err(SieveError::Domain(format!("empty segment [{lo}, {hi})")));
    }
    if hi > MAX_SIEVE_HI {
        return Err(SieveError::Domain(format!(
            "hi = {hi} exceeds {MAX_SIEVE_HI}; sigma sums past that bound could overflow u64"
        )));
    }
    if hi - lo > MAX_SEGMENT_LEN {
        return Err(SieveError::Resource(format!(
            "segment of {} exceeds the {MAX_SEGMENT_LEN} budget; split the range",
            hi - lo
        )));
    }
    Ok(())
}

/// The list must contain every prime <= need. Cheap precise check: either the
/// list reaches `need`, or the short gap (last listed prime, need] is verified
/// prime-free. Gaps beyond 2000 always contain a prime at u64 scale.
fn check_prime_cover(primes: &[u64], need: u64) -> Result<()> {
    if need < 2 {
        return Ok(());
    }
    let have = primes.last().copied().unwrap_or(1);
    let err = Err(SieveError::IncompletePrimes { need, have });
    if primes.first() != Some(&2) {
        return err;
    }
    if have >= need {
        return Ok(());
    }
    if need - have > 2000 {
        return err;
    }
    for m in have + 1..=need {
        if crate::arith::is_prime(m) {
            return err;
        }
    }
    Ok(())
}

fn first_multiple(p: u64, lo: u64) -> u64 {
    lo.div_ceil(p) * p
}

pub(crate) fn build_segment(
    lo: u64,
    hi: u64,
    primes: &[u64],
    needs: SegmentNeeds,
) -> Result<SegmentData> {
    check_bounds(lo, hi)?;
    if let Some(k) = needs.kfree {
        if k < 2 {
            return Err(SieveError::Domain(format!(
                "k-free flags need k >= 2, got {k}"
            )));
        }
    }
    let len = (hi - lo) as usize;
    let need_div = needs.sigma || needs.factors;
    let sqrt_need = isqrt(hi - 1);
    let mut cover = if need_div { sqrt_need } else { 0 };
    if let Some(k) = needs.kfree {
        cover = cover.max(iroot(hi - 1, k));
    }
    check_prime_cover(primes, cover)?;

    let mut sigma = if needs.sigma { vec![1u64; len] } else { Vec::new() };
    let mut rem: Vec<u64> = if need_div { (lo..hi).collect() } else { Vec::new() };
    let mut flat: Vec<(u32, u64, u8)> = Vec::new();
    let mut nfac = if needs.factors { vec![0u32; len] } else { Vec::new() };

    if need_div {
        for &p in primes {
            if p > sqrt_need {
                break;
            }
            let mut j = first_multiple(p, lo);
            while j < hi {
                let i = (j - lo) as usize;
                let mut r = rem[i];
                let mut e = 0u8;
                let mut s = 1u64;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                    // s*p + 1 and the sigma products stay below sigma(n) < 7.2*hi,
                    // which fits u64 because hi <= MAX_SIEVE_HI
                    s = s * p + 1;
                }
                rem[i] = r;
                if needs.sigma {
                    sigma[i] *= s;
                }
                if needs.factors {
                    flat.push((i as u32, p, e));
                    nfac[i] += 1;
                }
                j += p;
            }
        }
        // every candidate divisor <= sqrt(hi-1) is gone, so leftovers are prime
        for i in 0..len {
            let r = rem[i];
            if r > 1 {
                if needs.sigma {
                    sigma[i] *= r + 1;
                }
                if needs.factors {
                    flat.push((i as u32, r, 1));
                    nfac[i] += 1;
                }
            }
        }
        #[cfg(debug_assertions)]
        if needs.sigma {
            for i in 0..len {
                debug_assert!(sigma[i] > lo + i as u64, "sigma({}) too small", lo + i as u64);
            }
        }
    }

    let kfree = match needs.kfree {
        Some(k) => {
            let mut bits = Bitset::all_set(len);
            let root = iroot(hi - 1, k);
            for &p in primes {
                if p > root {
                    break;
                }
                let pk = p.pow(k);
                let mut j = first_multiple(pk, lo);
                while j < hi {
                    bits.clear((j - lo) as usize);
                    j += pk;
                }
            }
            Some(bits)
        }
        None => None,
    };

    let factors = if needs.factors {
        let mut offsets = vec![0u32; len + 1];
        for i in 0..len {
            offsets[i + 1] = offsets[i] + nfac[i];
        }
        let mut entries = vec![(0u64, 0u8); flat.len()];
        let mut cursor: Vec<u32> = offsets[..len].to_vec();
        for &(i, p, e) in &flat {
            entries[cursor[i as usize] as usize] = (p, e);
            cursor[i as usize] += 1;
        }
        Some(SegmentFactors {
            lo,
            hi,
            offsets,
            entries,
        })
    } else {
        None
    };

    Ok(SegmentData {
        lo,
        hi,
        sigma: needs.sigma.then_some(sigma),
        factors,
        kfree,
    })
}

/// Divisor sums for [lo, hi). `primes` must contain every prime up to
/// sqrt(hi - 1); extra primes beyond that are ignored.
pub fn sigma_segment(lo: u64, hi: u64, primes: &[u64]) -> Result<SieveSegment> {
    let data = build_segment(
        lo,
        hi,
        primes,
        SegmentNeeds {
            sigma: true,
            ..Default::default()
        },
    )?;
    Ok(SieveSegment {
        lo,
        hi,
        sigma: data.sigma.unwrap(),
        kfree: None,
    })
}

/// Divisor sums plus k-free flags in one pass over [lo, hi).
pub fn sigma_segment_with_kfree(lo: u64, hi: u64, primes: &[u64], k: u32) -> Result<SieveSegment> {
    let data = build_segment(
        lo,
        hi,
        primes,
        SegmentNeeds {
            sigma: true,
            factors: false,
            kfree: Some(k),
        },
    )?;
    Ok(SieveSegment {
        lo,
        hi,
        sigma: data.sigma.unwrap(),
        kfree: Some((k, data.kfree.unwrap())),
    })
}

/// k-free flags for [lo, hi): bit i set iff lo + i has no k-th-power prime
/// divisor. Marks multiples of p^k directly, independent of the divisor-sum
/// route. Sieves its own prime list up to (hi-1)^(1/k).
pub fn kfree_segment(lo: u64, hi: u64, k: u32) -> Result<Bitset> {
    check_bounds(lo, hi)?;
    if k < 2 {
        return Err(SieveError::Domain(format!(
            "k-free flags need k >= 2, got {k}"
        )));
    }
    let primes = sieve_primes(iroot(hi - 1, k));
    let data = build_segment(
        lo,
        hi,
        &primes,
        SegmentNeeds {
            kfree: Some(k),
            ..Default::default()
        },
    )?;
    Ok(data.kfree.unwrap())
}

/// Factorizations of every n in [lo, hi). Same prime-list contract as
/// [`sigma_segment`].
pub fn factor_segment(lo: u64, hi: u64, primes: &[u64]) -> Result<SegmentFactors> {
    let data = build_segment(
        lo,
        hi,
        primes,
        SegmentNeeds {
            factors: true,
            ..Default::default()
        },
    )?;
    Ok(data.factors.unwrap())
}
