//! Head-to-head classification of n and s(n): how often does k-freeness of
//! one fail to transfer to the other?

use crate::report::ExperimentReport;

use super::{fold_segments, kfree_value, scan_prime_list, zeta_reference, Result, RunConfig, ScanError};
use crate::sieve::SegmentNeeds;

/// Tallies over 2 <= n <= x (n = 1 is excluded: s(1) = 0 has no k-free
/// classification). Densities divide by x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceCounts {
    pub x: u64,
    pub k: u32,
    /// Number of n scanned, x - 1.
    pub total: u64,
    pub n_kfree: u64,
    pub s_kfree: u64,
    /// n is k-free but s(n) is not.
    pub mismatch_n_free_s_not: u64,
    /// s(n) is k-free but n is not.
    pub mismatch_s_free_n_not: u64,
}

impl EquivalenceCounts {
    fn empty(x: u64, k: u32) -> Self {
        Self {
            x,
            k,
            total: 0,
            n_kfree: 0,
            s_kfree: 0,
            mismatch_n_free_s_not: 0,
            mismatch_s_free_n_not: 0,
        }
    }

    /// Merge of tallies over disjoint ranges; associative and commutative.
    pub fn merge(mut self, o: Self) -> Self {
        debug_assert!(self.x == o.x && self.k == o.k);
        self.total += o.total;
        self.n_kfree += o.n_kfree;
        self.s_kfree += o.s_kfree;
        self.mismatch_n_free_s_not += o.mismatch_n_free_s_not;
        self.mismatch_s_free_n_not += o.mismatch_s_free_n_not;
        self
    }

    pub fn mismatch_total(&self) -> u64 {
        self.mismatch_n_free_s_not + self.mismatch_s_free_n_not
    }

    pub fn mismatch_density(&self) -> f64 {
        self.mismatch_total() as f64 / self.x as f64
    }

    pub fn n_kfree_density(&self) -> f64 {
        self.n_kfree as f64 / self.x as f64
    }

    pub fn s_kfree_density(&self) -> f64 {
        self.s_kfree as f64 / self.x as f64
    }

    pub fn to_report(&self) -> Result<ExperimentReport> {
        Ok(ExperimentReport::new("conjecture", self.x)
            .with_param("k", self.k)
            .with_count("total", self.total)
            .with_count("n_kfree", self.n_kfree)
            .with_count("s_kfree", self.s_kfree)
            .with_count("mismatch_n_free_s_not", self.mismatch_n_free_s_not)
            .with_count("mismatch_s_free_n_not", self.mismatch_s_free_n_not)
            .with_count("mismatch_total", self.mismatch_total())
            .with_density("density_n_kfree", self.n_kfree_density())
            .with_density("density_s_kfree", self.s_kfree_density())
            .with_density("density_mismatch", self.mismatch_density())
            .with_reference("zeta_reciprocal", zeta_reference(self.k)?))
    }
}

/// Classifies every n in [2, x]: n by the segment's k-free bit sieve, s(n)
/// by direct trial factorization of the sieved sigma value. The two routes
/// never share factored data.
pub fn scan_conjecture(x: u64, k: u32, cfg: &RunConfig) -> Result<EquivalenceCounts> {
    if x < 2 {
        return Err(ScanError::Domain(format!(
            "conjecture scan needs x >= 2, got {x}"
        )));
    }
    if k < 2 {
        return Err(ScanError::Domain(format!(
            "conjecture scan needs k >= 2, got {k}"
        )));
    }
    let primes = scan_prime_list(x);
    let needs = SegmentNeeds {
        sigma: true,
        factors: false,
        kfree: Some(k),
    };
    fold_segments(
        x,
        needs,
        cfg,
        &primes,
        EquivalenceCounts::empty(x, k),
        |seg| {
            let sigma = seg.sigma.as_ref().unwrap();
            let bits = seg.kfree.as_ref().unwrap();
            let mut acc = EquivalenceCounts::empty(x, k);
            for (i, &sg) in sigma.iter().enumerate() {
                let n = seg.lo + i as u64;
                let n_free = bits.get(i);
                let s_free = kfree_value(sg - n, k, &primes)?;
                acc.total += 1;
                if n_free {
                    acc.n_kfree += 1;
                }
                if s_free {
                    acc.s_kfree += 1;
                }
                if n_free && !s_free {
                    acc.mismatch_n_free_s_not += 1;
                }
                if s_free && !n_free {
                    acc.mismatch_s_free_n_not += 1;
                }
            }
            Ok(acc)
        },
        EquivalenceCounts::merge,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scan_by_hand() {
        // x = 30, k = 2, checked by listing squarefree n and s(n)
        let c = scan_conjecture(30, 2, &RunConfig::default()).unwrap();
        assert_eq!(c.total, 29);
        assert_eq!(c.n_kfree, 18);
        assert_eq!(c.s_kfree, 22);
        // {10, 15, 26}: squarefree with s = 8, 9, 16
        assert_eq!(c.mismatch_n_free_s_not, 3);
        // {4, 8, 16, 18, 20, 25, 27}: non-squarefree with squarefree s
        assert_eq!(c.mismatch_s_free_n_not, 7);
        assert_eq!(c.mismatch_total(), 10);
    }

    #[test]
    fn domain_checks() {
        assert!(scan_conjecture(1, 2, &RunConfig::default()).is_err());
        assert!(scan_conjecture(100, 1, &RunConfig::default()).is_err());
        let bad = RunConfig {
            segment_len: 0,
            ..Default::default()
        };
        assert!(scan_conjecture(100, 2, &bad).is_err());
    }

    #[test]
    fn merge_has_identity_and_commutes() {
        let a = scan_conjecture(500, 2, &RunConfig::default()).unwrap();
        let id = EquivalenceCounts::empty(500, 2);
        assert_eq!(a.merge(id), a);
        let cfg = RunConfig {
            segment_len: 37,
            ..Default::default()
        };
        assert_eq!(scan_conjecture(500, 2, &cfg).unwrap(), a);
    }

    #[test]
    fn report_shape() {
        let c = scan_conjecture(200, 4, &RunConfig::default()).unwrap();
        let r = c.to_report().unwrap();
        assert_eq!(r.statistic, "conjecture");
        assert_eq!(r.x, 200);
        assert_eq!(r.counts["total"], 199);
        assert_eq!(
            r.counts["mismatch_total"],
            r.counts["mismatch_n_free_s_not"] + r.counts["mismatch_s_free_n_not"]
        );
        for (_, &d) in &r.densities {
            assert!((0.0..=1.0).contains(&d));
        }
    }
}
