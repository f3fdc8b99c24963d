//! Density of n <= x with no unitary prime p || n in the residue class
//! a mod m, compared against the heuristic (log x)^(-1/phi(m)).

use crate::arith;
use crate::report::ExperimentReport;
use crate::sieve::SegmentNeeds;
use crate::util::gcd;

use super::{fold_segments, scan_prime_list, Result, RunConfig, ScanError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PomeranceDeficiency {
    pub x: u64,
    pub a: i64,
    pub m: u64,
    /// n in [1, x] with no prime p, p || n, p = a (mod m).
    pub count_deficient: u64,
}

impl PomeranceDeficiency {
    pub fn density(&self) -> f64 {
        self.count_deficient as f64 / self.x as f64
    }

    /// (log x)^(-1/phi(m)), the expected order of the density.
    pub fn comparator(&self) -> f64 {
        let phi = euler_phi(self.m) as f64;
        (self.x as f64).ln().powf(-1.0 / phi)
    }

    pub fn to_report(&self) -> ExperimentReport {
        ExperimentReport::new("pomerance", self.x)
            .with_param("a", self.a)
            .with_param("m", self.m)
            .with_count("count_deficient", self.count_deficient)
            .with_density("density", self.density())
            .with_reference("comparator", self.comparator())
    }
}

fn euler_phi(m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let f = arith::factorize(m).expect("m >= 1 was checked");
    f.factors()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// Counts n in [1, x] whose factorization has no exponent-1 prime in the
/// class a mod m. Requires gcd(a, m) = 1; a may be negative (reduced mod m).
pub fn scan_pomerance_deficiency(
    x: u64,
    a: i64,
    m: u64,
    cfg: &RunConfig,
) -> Result<PomeranceDeficiency> {
    if x < 2 {
        return Err(ScanError::Domain(format!(
            "deficiency scan needs x >= 2, got {x}"
        )));
    }
    if m == 0 {
        return Err(ScanError::Domain("modulus m must be >= 1".into()));
    }
    let a_norm = a.rem_euclid(m as i64) as u64;
    // gcd(0, m) = m, so a_norm = 0 passes only for m = 1
    if gcd(a_norm, m) != 1 {
        return Err(ScanError::Domain(format!(
            "class a = {a} and modulus m = {m} must be coprime"
        )));
    }
    cfg.validate()?;
    let primes = scan_prime_list(x);
    let needs = SegmentNeeds {
        factors: true,
        ..Default::default()
    };
    let deficient = fold_segments(
        x,
        needs,
        cfg,
        &primes,
        0u64,
        |seg| {
            let fs = seg.factors.as_ref().unwrap();
            let mut c = 0u64;
            for n in seg.lo..seg.hi {
                let hit = fs
                    .factor_slice(n)?
                    .iter()
                    .any(|&(p, e)| e == 1 && p % m == a_norm);
                if !hit {
                    c += 1;
                }
            }
            Ok(c)
        },
        |a, b| a + b,
    )?;
    Ok(PomeranceDeficiency {
        x,
        a,
        m,
        // n = 1 has no unitary primes at all, hence is deficient
        count_deficient: deficient + 1,
    })
}
