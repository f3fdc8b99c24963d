//! Density of k-free integers against the Euler-product prediction 1/zeta(k).

use crate::report::ExperimentReport;
use crate::sieve::SegmentNeeds;
use crate::util::isqrt;

use super::{fold_segments, zeta_reference, Result, RunConfig, ScanError};

/// Count of k-free n in [2, x]; the density divides by x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KfreeDensity {
    pub x: u64,
    pub k: u32,
    pub count_kfree: u64,
}

impl KfreeDensity {
    pub fn density(&self) -> f64 {
        self.count_kfree as f64 / self.x as f64
    }

    pub fn to_report(&self) -> Result<ExperimentReport> {
        let reference = zeta_reference(self.k)?;
        Ok(ExperimentReport::new("kfree-density", self.x)
            .with_param("k", self.k)
            .with_count("count_kfree", self.count_kfree)
            .with_density("density", self.density())
            .with_density("abs_error", (self.density() - reference).abs())
            .with_reference("reference", reference))
    }
}

/// Counts k-free integers by the p^k bit sieve (no factorizations involved).
pub fn scan_kfree_density(x: u64, k: u32, cfg: &RunConfig) -> Result<KfreeDensity> {
    if x < 2 {
        return Err(ScanError::Domain(format!(
            "k-free density scan needs x >= 2, got {x}"
        )));
    }
    if k < 2 {
        return Err(ScanError::Domain(format!(
            "k-free density scan needs k >= 2, got {k}"
        )));
    }
    let primes = crate::sieve::sieve_primes(isqrt(x) + 1);
    let needs = SegmentNeeds {
        sigma: false,
        factors: false,
        kfree: Some(k),
    };
    let count = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        0u64,
        |seg| Ok(seg.kfree.as_ref().unwrap().count_set()),
        |a, b| a + b,
    )?;
    Ok(KfreeDensity {
        x,
        k,
        count_kfree: count,
    })
}
