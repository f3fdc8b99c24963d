//! Popularity of abundancy ratios: M(x), the highest multiplicity that any
//! value of sigma(m)/m attains on [1, x], the ratios attaining it, and the
//! growth estimate lambda_hat = log M(x) * log log x / log x.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::arith::ReducedRatio;
use crate::report::ExperimentReport;
use crate::sieve::SegmentNeeds;

use super::{fold_segments, scan_prime_list, Result, RunConfig, ScanError};

/// Collation strategy and memory policy for the popularity scan.
#[derive(Debug, Clone, Copy)]
pub struct WirsingOptions {
    /// Count hashed buckets exactly in a first sweep, then recount only the
    /// candidate buckets: O(2^bucket_bits) memory instead of O(x), paid for
    /// with extra sweeps.
    pub two_pass: bool,
    /// Budget in bytes for the ratio buffer (single-pass) or one recount
    /// batch (two-pass).
    pub budget_bytes: u64,
    /// log2 of the bucket table size in two-pass mode.
    pub bucket_bits: u32,
}

impl Default for WirsingOptions {
    fn default() -> Self {
        Self {
            two_pass: false,
            budget_bytes: 1 << 29,
            bucket_bits: 22,
        }
    }
}

/// Reports keep at most this many argmax ratios; `argmax_total` always has
/// the full count.
pub const ARGMAX_REPORT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct WirsingPopularity {
    pub x: u64,
    /// M(x): the top multiplicity among abundancy ratios of m <= x.
    pub m_max: u64,
    /// How many distinct ratios attain M(x).
    pub argmax_total: u64,
    /// Attaining ratios, ascending, truncated to [`ARGMAX_REPORT_CAP`].
    pub argmax: Vec<ReducedRatio>,
    pub lambda_hat: f64,
}

impl WirsingPopularity {
    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("wirsing", self.x)
            .with_count("m_max", self.m_max)
            .with_count("argmax_total", self.argmax_total)
            .with_density("density_m_max", self.m_max as f64 / self.x as f64)
            .with_reference("lambda_hat", self.lambda_hat)
            .with_detail(
                "argmax_ratios",
                self.argmax
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            )
    }
}

/// Run-length collation of a sorted ratio list: (m_max, number of runs of
/// that length, up to CAP of those runs' ratios, ascending).
fn best_runs(sorted: &[ReducedRatio]) -> (u64, u64, Vec<ReducedRatio>) {
    let mut m_max = 0u64;
    let mut total = 0u64;
    let mut arg: Vec<ReducedRatio> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let run = (j - i) as u64;
        if run > m_max {
            m_max = run;
            total = 1;
            arg.clear();
            arg.push(sorted[i]);
        } else if run == m_max {
            total += 1;
            if arg.len() < ARGMAX_REPORT_CAP {
                arg.push(sorted[i]);
            }
        }
        i = j;
    }
    (m_max, total, arg)
}

fn one() -> ReducedRatio {
    ReducedRatio::new(1, 1).expect("1/1 is a valid ratio")
}

fn collate_single_pass(
    x: u64,
    cfg: &RunConfig,
    opts: &WirsingOptions,
    primes: &[u64],
) -> Result<(u64, u64, Vec<ReducedRatio>)> {
    let est = 16u64.saturating_mul(x);
    if est > opts.budget_bytes {
        return Err(ScanError::Resource(format!(
            "collating {x} abundancy ratios in memory needs ~{est} bytes, budget is {}; \
             enable two-pass counting or raise the budget",
            opts.budget_bytes
        )));
    }
    let needs = SegmentNeeds {
        sigma: true,
        ..Default::default()
    };
    let mut ratios: Vec<ReducedRatio> = fold_segments(
        x,
        needs,
        cfg,
        primes,
        Vec::new(),
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let mut v = Vec::with_capacity(sigma.len());
            for (i, &sg) in sigma.iter().enumerate() {
                let m = seg.lo + i as u64;
                v.push(ReducedRatio::new(sg, m).expect("m > 0"));
            }
            Ok(v)
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )?;
    ratios.push(one()); // m = 1
    ratios.sort_unstable();
    Ok(best_runs(&ratios))
}

/// Mixes both limbs of a reduced ratio into a bucket index.
fn bucket_of(r: ReducedRatio, bits: u32) -> usize {
    let mut z = r
        .num()
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .rotate_left(31)
        ^ r.den().wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> (64 - bits)) as usize
}

fn collate_two_pass(
    x: u64,
    cfg: &RunConfig,
    opts: &WirsingOptions,
    primes: &[u64],
) -> Result<(u64, u64, Vec<ReducedRatio>)> {
    let bits = opts.bucket_bits.clamp(10, 28);
    let table_bytes = 4u64 << bits;
    if table_bytes > opts.budget_bytes {
        return Err(ScanError::Resource(format!(
            "bucket table of {table_bytes} bytes exceeds the {} budget; lower bucket_bits",
            opts.budget_bytes
        )));
    }
    let needs = SegmentNeeds {
        sigma: true,
        ..Default::default()
    };
    let counts: Vec<AtomicU32> = (0..1usize << bits).map(|_| AtomicU32::new(0)).collect();
    fold_segments(
        x,
        needs,
        cfg,
        primes,
        (),
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            for (i, &sg) in sigma.iter().enumerate() {
                let m = seg.lo + i as u64;
                let r = ReducedRatio::new(sg, m).expect("m > 0");
                counts[bucket_of(r, bits)].fetch_add(1, Ordering::Relaxed);
            }
            Ok(())
        },
        |(), ()| (),
    )?;
    counts[bucket_of(one(), bits)].fetch_add(1, Ordering::Relaxed); // m = 1
    let snapshot: Vec<u32> = counts.iter().map(|c| c.load(Ordering::Relaxed)).collect();
    drop(counts);

    // candidate buckets, busiest first; ties broken by index so batching is
    // deterministic
    let mut order: Vec<u32> = (0..snapshot.len() as u32)
        .filter(|&b| snapshot[b as usize] > 0)
        .collect();
    order.sort_unstable_by(|&a, &b| {
        snapshot[b as usize]
            .cmp(&snapshot[a as usize])
            .then(a.cmp(&b))
    });
    let batch_ratio_cap = (opts.budget_bytes / 16).max(256);

    let mut m_max = 0u64;
    let mut total = 0u64;
    let mut arg: Vec<ReducedRatio> = Vec::new();
    let mut pos = 0usize;
    while pos < order.len() {
        // a bucket's count bounds every multiplicity inside it, so once the
        // busiest remaining bucket is below the best run nothing can change
        if (snapshot[order[pos] as usize] as u64) < m_max {
            break;
        }
        let mut end = pos;
        let mut batch_sz = 0u64;
        while end < order.len() {
            let c = snapshot[order[end] as usize] as u64;
            if batch_sz + c > batch_ratio_cap && end > pos {
                break;
            }
            batch_sz += c;
            end += 1;
        }
        let mut member = vec![0u64; (1usize << bits).div_ceil(64)];
        for &b in &order[pos..end] {
            member[b as usize >> 6] |= 1u64 << (b & 63);
        }
        let in_batch = |b: usize| member[b >> 6] >> (b & 63) & 1 == 1;
        let mut ratios: Vec<ReducedRatio> = fold_segments(
            x,
            needs,
            cfg,
            primes,
            Vec::new(),
            |seg| {
                let sigma = seg.sigma.as_ref().unwrap();
                let mut v = Vec::new();
                for (i, &sg) in sigma.iter().enumerate() {
                    let m = seg.lo + i as u64;
                    let r = ReducedRatio::new(sg, m).expect("m > 0");
                    if in_batch(bucket_of(r, bits)) {
                        v.push(r);
                    }
                }
                Ok(v)
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )?;
        if in_batch(bucket_of(one(), bits)) {
            ratios.push(one());
        }
        ratios.sort_unstable();
        let (bm, bt, ba) = best_runs(&ratios);
        if bm > m_max {
            m_max = bm;
            total = bt;
            arg = ba;
        } else if bm == m_max && bm > 0 {
            total += bt;
            for r in ba {
                if arg.len() < ARGMAX_REPORT_CAP {
                    arg.push(r);
                }
            }
        }
        pos = end;
    }
    arg.sort_unstable();
    arg.truncate(ARGMAX_REPORT_CAP);
    Ok((m_max, total, arg))
}

/// Popularity scan over m in [1, x]. Needs x >= 3 so that log log x > 0 in
/// the lambda-hat estimate.
pub fn scan_wirsing_popularity(
    x: u64,
    cfg: &RunConfig,
    opts: &WirsingOptions,
) -> Result<WirsingPopularity> {
    if x < 3 {
        return Err(ScanError::Domain(format!(
            "popularity scan needs x >= 3 (log log x must be positive), got {x}"
        )));
    }
    cfg.validate()?;
    let primes = scan_prime_list(x);
    let (m_max, argmax_total, argmax) = if opts.two_pass {
        collate_two_pass(x, cfg, opts, &primes)?
    } else {
        collate_single_pass(x, cfg, opts, &primes)?
    };
    let log_x = (x as f64).ln();
    let lambda_hat = (m_max as f64).ln() * log_x.ln() / log_x;
    Ok(WirsingPopularity {
        x,
        m_max,
        argmax_total,
        argmax,
        lambda_hat,
    })
}

/// Exact multiplicity of `ratio` as an abundancy on [1, x], by
/// cross-multiplication sigma(m) * den == m * num in u128. Independent of
/// the collation machinery; used to audit argmax claims.
pub fn wirsing_recount(x: u64, ratio: ReducedRatio, cfg: &RunConfig) -> Result<u64> {
    if x == 0 {
        return Err(ScanError::Domain("recount needs x >= 1".into()));
    }
    let base = u64::from(ratio.num() == ratio.den()); // m = 1 has ratio 1/1
    if x < 2 {
        return Ok(base);
    }
    let primes = scan_prime_list(x);
    let needs = SegmentNeeds {
        sigma: true,
        ..Default::default()
    };
    let count = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        0u64,
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let mut c = 0u64;
            for (i, &sg) in sigma.iter().enumerate() {
                let m = seg.lo + i as u64;
                if sg as u128 * ratio.den() as u128 == m as u128 * ratio.num() as u128 {
                    c += 1;
                }
            }
            Ok(c)
        },
        |a, b| a + b,
    )?;
    Ok(count + base)
}
