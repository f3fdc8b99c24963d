//! Exact arithmetic on single integers: factorization, divisor sums, k-free
//! tests, prime extremes, powerful parts, abundancy ratios and reference
//! values of 1/zeta(k).

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::util::{gcd, isqrt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Input outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A result does not fit in 64 bits.
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, ArithError>;

/// Prime factorization of a positive integer. Factors are (prime, exponent)
/// pairs with strictly increasing primes; 1 factors into the empty product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from raw parts, validating every invariant:
    /// primes strictly increasing and actually prime, exponents positive,
    /// product equal to `value`.
    pub fn from_parts(value: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        if value == 0 {
            return Err(ArithError::Domain("0 has no prime factorization".into()));
        }
        let mut prod: u64 = 1;
        let mut last = 1u64;
        for &(p, e) in &factors {
            if p <= last {
                return Err(ArithError::Domain(format!(
                    "primes not strictly increasing at {p}"
                )));
            }
            if e == 0 {
                return Err(ArithError::Domain(format!("zero exponent at prime {p}")));
            }
            if !is_prime(p) {
                return Err(ArithError::Domain(format!("{p} is not prime")));
            }
            last = p;
            for _ in 0..e {
                prod = prod.checked_mul(p).ok_or_else(|| {
                    ArithError::Overflow("factor product exceeds u64".into())
                })?;
            }
        }
        if prod != value {
            return Err(ArithError::Domain(format!(
                "factors multiply to {prod}, not {value}"
            )));
        }
        Ok(Self { value, factors })
    }

    /// Internal constructor for factorizations produced by our own sieves.
    /// Skips primality re-checks; structural invariants still hold in debug.
    pub(crate) fn new_unchecked(value: u64, factors: Vec<(u64, u32)>) -> Self {
        #[cfg(debug_assertions)]
        {
            let mut prod: u64 = 1;
            let mut last = 1u64;
            for &(p, e) in &factors {
                assert!(p > last && e > 0, "bad factor ({p},{e}) for {value}");
                last = p;
                for _ in 0..e {
                    prod = prod.checked_mul(p).expect("factor product overflow");
                }
            }
            assert_eq!(prod, value, "factors do not multiply back to {value}");
        }
        Self { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// (prime, exponent) pairs with primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Largest prime factor; 1 for n = 1.
    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    /// Exponent of `p` in the factorization (0 when p does not divide n).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map_or(0, |i| self.factors[i].1)
    }
}

/// Smallest/largest prime data of an integer. Conventions for n = 1: its
/// smallest prime factor is unbounded (`None`, the "infinity" of the empty
/// minimum) and its largest is 1. `second_largest` collapses multiplicity:
/// it is the second largest *distinct* prime, and 1 exactly when n is 1 or
/// a prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeExtremes {
    pub smallest: Option<u64>,
    pub largest: u64,
    pub second_largest: u64,
}

/// Ratio of nonnegative integers stored in lowest terms (denominator > 0).
/// Ordering is by numeric value, which on reduced forms agrees with equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedRatio {
    num: u64,
    den: u64,
}

impl ReducedRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(ArithError::Domain("zero denominator".into()));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for ReducedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Ord for ReducedRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for ReducedRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SPF_LIMIT: u64 = 1 << 20;

/// Smallest-prime-factor table for n < 2^20, built by linear sieve on first
/// use. Entries 0 and 1 are unused and stay 0.
fn spf_small() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = SPF_LIMIT as usize;
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
        spf
    })
}

/// Primes below 2^16: enough trial divisors to reduce any u64 to a cofactor
/// with no prime factor below 2^16.
fn primes_16bit() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let spf = spf_small();
        (2..1u64 << 16)
            .filter(|&i| spf[i as usize] as u64 == i)
            .collect()
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test: Miller-Rabin with the first twelve primes as
/// bases, a set exhaustive far beyond 64 bits.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'base: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// One Brent cycle-detection pass with polynomial x^2 + c; None means this c
/// found nothing and the caller should reseed.
fn rho_once(n: u64, c: u64) -> Option<u64> {
    let step = |x: u64| add_mod(mul_mod(x, x, n), c, n);
    let mut y = 2u64;
    let mut x = y;
    let mut ys = y;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut d = 1u64;
    while d == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0;
        while k < r && d == 1 {
            ys = y;
            let batch = 128.min(r - k);
            for _ in 0..batch {
                y = step(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            d = gcd(q, n);
            k += batch;
        }
        r <<= 1;
        if r > 1 << 24 {
            return None;
        }
    }
    if d == n {
        // the batch jumped past the factor; replay it one step at a time
        for _ in 0..=r {
            ys = step(ys);
            d = gcd(x.abs_diff(ys), n);
            if d > 1 {
                break;
            }
        }
    }
    if d > 1 && d < n {
        Some(d)
    } else {
        None
    }
}

/// Nontrivial factor of an odd composite with no prime factor below 2^16.
/// Deterministic: perfect squares are split directly, then c = 1, 2, ... in
/// order until a cycle yields a factor.
fn rho_factor(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && n > 1 && !is_prime(n));
    let r = isqrt(n);
    if r * r == n {
        return r;
    }
    let mut c = 1u64;
    loop {
        if let Some(d) = rho_once(n, c) {
            return d;
        }
        c += 1;
    }
}

fn factor_collect(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_factor(n);
    factor_collect(d, out);
    factor_collect(n / d, out);
}

/// Factors any n >= 1. Inputs below 2^20 walk the smallest-prime-factor
/// table; larger ones are trial-divided by every prime below 2^16, and the
/// leftover cofactor (no prime factor below 2^16, so prime or a product of
/// at most three large primes) is certified or split deterministically.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(ArithError::Domain("0 has no prime factorization".into()));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    if n < SPF_LIMIT {
        let spf = spf_small();
        let mut m = n;
        while m > 1 {
            let p = spf[m as usize] as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        return Ok(Factorization::new_unchecked(n, factors));
    }
    let mut m = n;
    for &p in primes_16bit() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if m < 1 << 32 || is_prime(m) {
            // trial division already proved cofactors below 2^32 prime
            debug_assert!(is_prime(m));
            factors.push((m, 1));
        } else {
            let mut big = Vec::new();
            factor_collect(m, &mut big);
            big.sort_unstable();
            let mut i = 0;
            while i < big.len() {
                let p = big[i];
                let mut e = 0u32;
                while i < big.len() && big[i] == p {
                    e += 1;
                    i += 1;
                }
                factors.push((p, e));
            }
        }
    }
    Ok(Factorization::new_unchecked(n, factors))
}

/// sigma(n), the sum of all divisors: product over prime powers of
/// (p^(e+1) - 1)/(p - 1), accumulated as 1 + p + ... + p^e with checked
/// arithmetic. Overflow is an error, never a silent wrap.
pub fn divisor_sigma(f: &Factorization) -> Result<u64> {
    let overflow = || ArithError::Overflow(format!("sigma({}) exceeds u64", f.value()));
    let mut sigma: u64 = 1;
    for &(p, e) in f.factors() {
        let mut s: u64 = 1;
        for _ in 0..e {
            s = s
                .checked_mul(p)
                .and_then(|v| v.checked_add(1))
                .ok_or_else(overflow)?;
        }
        sigma = sigma.checked_mul(s).ok_or_else(overflow)?;
    }
    Ok(sigma)
}

/// s(n) = sigma(n) - n, the sum of proper divisors; s(1) = 0.
pub fn aliquot(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(divisor_sigma(&f)? - n)
}

/// True when no prime divides n to the k-th power; 1 is k-free for every k.
/// k < 2 is rejected: every integer is divisible by a first power.
pub fn is_kfree(f: &Factorization, k: u32) -> Result<bool> {
    if k < 2 {
        return Err(ArithError::Domain(format!(
            "k-free classification needs k >= 2, got {k}"
        )));
    }
    Ok(f.factors().iter().all(|&(_, e)| e < k))
}

/// Largest powerful divisor of n: the product of p^e over primes with e >= 2.
pub fn powerful_part(f: &Factorization) -> u64 {
    let mut out: u64 = 1;
    for &(p, e) in f.factors() {
        if e >= 2 {
            for _ in 0..e {
                // divides n, so it cannot overflow
                out *= p;
            }
        }
    }
    out
}

pub fn prime_extremes(f: &Factorization) -> PrimeExtremes {
    let fs = f.factors();
    PrimeExtremes {
        smallest: fs.first().map(|&(p, _)| p),
        largest: fs.last().map_or(1, |&(p, _)| p),
        second_largest: if fs.len() >= 2 {
            fs[fs.len() - 2].0
        } else {
            1
        },
    }
}

/// sigma(n)/n in lowest terms.
pub fn abundancy(f: &Factorization) -> Result<ReducedRatio> {
    ReducedRatio::new(divisor_sigma(f)?, f.value())
}

/// 1/zeta(k) as the truncated Euler product over primes p <= P of (1 - p^-k).
///
/// Convergence: dropping the primes above P multiplies the result by
/// prod_{p>P}(1 - p^-k), whose distance from 1 is at most
/// sum_{p>P} p^-k / (1 - p^-k) <= (9/8) * P^(1-k) / (k-1) for P >= 3.
/// P is chosen to push that below eps/2; the remaining budget dwarfs the
/// rounding error of ~pi(P) float multiplications.
pub fn zeta_reciprocal(k: u32, eps: f64) -> Result<f64> {
    if k < 2 {
        return Err(ArithError::Domain(format!(
            "zeta reciprocal needs k >= 2, got {k}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ArithError::Domain(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let km1 = (k - 1) as f64;
    let p_bound = (9.0 / (4.0 * eps * km1)).powf(1.0 / km1).ceil().max(3.0);
    if p_bound > 2e9 {
        return Err(ArithError::Domain(format!(
            "eps = {eps} needs primes past 2e9; loosen the tolerance"
        )));
    }
    let mut prod = 1.0f64;
    for p in crate::sieve::sieve_primes(p_bound as u64) {
        prod *= 1.0 - (p as f64).powi(-(k as i32));
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small_values() {
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(factorize(2).unwrap().factors(), &[(2, 1)]);
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1 << 19).unwrap().factors(), &[(2, 19)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_values() {
        assert_eq!(factorize(1 << 63).unwrap().factors(), &[(2, 63)]);
        assert_eq!(
            factorize(600_851_475_143).unwrap().factors(),
            &[(71, 1), (839, 1), (1471, 1), (6857, 1)]
        );
        // 2^53 - 1
        assert_eq!(
            factorize(9_007_199_254_740_991).unwrap().factors(),
            &[(6361, 1), (69431, 1), (20_394_401, 1)]
        );
        // 2^64 - 1 is squarefree with seven known prime factors
        assert_eq!(
            factorize(u64::MAX).unwrap().factors(),
            &[
                (3, 1),
                (5, 1),
                (17, 1),
                (257, 1),
                (641, 1),
                (65537, 1),
                (6_700_417, 1)
            ]
        );
        // 2^61 - 1 is a Mersenne prime
        let m61 = (1u64 << 61) - 1;
        assert_eq!(factorize(m61).unwrap().factors(), &[(m61, 1)]);
        // squares of primes straddling the 16-bit trial division bound
        assert_eq!(factorize(65521u64 * 65521).unwrap().factors(), &[(65521, 2)]);
        assert_eq!(factorize(65537u64 * 65537).unwrap().factors(), &[(65537, 2)]);
        // semiprime of two 31-bit primes
        let (p, q) = (2_147_483_647u64, 2_147_483_629u64);
        assert_eq!(factorize(p * q).unwrap().factors(), &[(q, 1), (p, 1)]);
    }

    #[test]
    fn from_parts_validates() {
        assert!(Factorization::from_parts(12, vec![(2, 2), (3, 1)]).is_ok());
        // wrong product
        assert!(Factorization::from_parts(12, vec![(2, 1), (3, 1)]).is_err());
        // out of order
        assert!(Factorization::from_parts(12, vec![(3, 1), (2, 2)]).is_err());
        // composite "prime"
        assert!(Factorization::from_parts(16, vec![(4, 2)]).is_err());
        // zero exponent
        assert!(Factorization::from_parts(2, vec![(2, 1), (3, 0)]).is_err());
        assert!(Factorization::from_parts(0, vec![]).is_err());
        assert!(Factorization::from_parts(1, vec![]).is_ok());
    }

    #[test]
    fn sigma_small_values() {
        // sigma over 1..=12
        let want = [1u64, 3, 4, 7, 6, 12, 8, 15, 13, 18, 12, 28];
        for (i, &s) in want.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(divisor_sigma(&factorize(n).unwrap()).unwrap(), s, "n={n}");
        }
    }

    #[test]
    fn sigma_overflow_is_an_error() {
        // u64::MAX is squarefree, so sigma multiplies 7 factors (p+1) and
        // exceeds 2^64
        let f = factorize(u64::MAX).unwrap();
        assert!(matches!(divisor_sigma(&f), Err(ArithError::Overflow(_))));
        // largest power of 2: sigma(2^63) = 2^64 - 1 still fits
        let f = factorize(1u64 << 63).unwrap();
        assert_eq!(divisor_sigma(&f).unwrap(), u64::MAX);
    }

    #[test]
    fn aliquot_small_values() {
        assert_eq!(aliquot(1).unwrap(), 0);
        assert_eq!(aliquot(2).unwrap(), 1);
        assert_eq!(aliquot(6).unwrap(), 6);
        assert_eq!(aliquot(28).unwrap(), 28);
        assert_eq!(aliquot(12).unwrap(), 16);
        // 2^53 - 1 = 6361 * 69431 * 20394401, all unitary
        let n = 9_007_199_254_740_991u64;
        assert_eq!(aliquot(n).unwrap(), 6362 * 69432 * 20_394_402 - n);
    }

    #[test]
    fn kfree_matches_naive_scan() {
        let naive = |n: u64, k: u32| -> bool {
            let mut m = 2u64;
            loop {
                let mut pk = 1u64;
                let mut over = false;
                for _ in 0..k {
                    pk = match pk.checked_mul(m) {
                        Some(v) => v,
                        None => {
                            over = true;
                            break;
                        }
                    };
                }
                if over || pk > n {
                    return true;
                }
                if n % pk == 0 {
                    return false;
                }
                m += 1;
            }
        };
        for k in 2..=5u32 {
            for n in 1..=2000u64 {
                let f = factorize(n).unwrap();
                assert_eq!(is_kfree(&f, k).unwrap(), naive(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn kfree_domain_and_edges() {
        let f = factorize(8).unwrap();
        assert!(is_kfree(&f, 1).is_err());
        assert!(is_kfree(&f, 0).is_err());
        assert!(is_kfree(&factorize(1).unwrap(), 2).unwrap());
        let p63 = factorize(1u64 << 63).unwrap();
        assert!(!is_kfree(&p63, 63).unwrap());
        assert!(is_kfree(&p63, 64).unwrap());
    }

    #[test]
    fn powerful_part_values() {
        let pp = |n: u64| powerful_part(&factorize(n).unwrap());
        assert_eq!(pp(1), 1);
        assert_eq!(pp(10), 1);
        assert_eq!(pp(12), 4);
        assert_eq!(pp(72), 72);
        assert_eq!(pp(360), 72);
        assert_eq!(pp(2 * 3 * 5 * 7), 1);
        for n in 1..=500u64 {
            let f = factorize(n).unwrap();
            let p = powerful_part(&f);
            assert_eq!(n % p, 0);
            let rest = factorize(n / p).unwrap();
            assert!(is_kfree(&rest, 2).unwrap(), "n/powerful not squarefree at {n}");
            assert_eq!(crate::util::gcd(p, n / p), 1);
        }
    }

    #[test]
    fn prime_extremes_values() {
        let pe = |n: u64| prime_extremes(&factorize(n).unwrap());
        assert_eq!(
            pe(1),
            PrimeExtremes { smallest: None, largest: 1, second_largest: 1 }
        );
        assert_eq!(
            pe(9),
            PrimeExtremes { smallest: Some(3), largest: 3, second_largest: 1 }
        );
        assert_eq!(
            pe(12),
            PrimeExtremes { smallest: Some(2), largest: 3, second_largest: 2 }
        );
        assert_eq!(
            pe(35),
            PrimeExtremes { smallest: Some(5), largest: 7, second_largest: 5 }
        );
        // multiplicity collapsed: 18 = 2 * 3^2
        assert_eq!(
            pe(18),
            PrimeExtremes { smallest: Some(2), largest: 3, second_largest: 2 }
        );
        for n in 1..=300u64 {
            let x = pe(n);
            let f = factorize(n).unwrap();
            let prime_power = f.factors().len() <= 1;
            assert_eq!(x.second_largest == 1, prime_power, "n={n}");
        }
    }

    #[test]
    fn abundancy_values() {
        let ab = |n: u64| abundancy(&factorize(n).unwrap()).unwrap();
        assert_eq!(ab(6), ReducedRatio::new(2, 1).unwrap());
        assert_eq!(ab(28), ReducedRatio::new(2, 1).unwrap());
        assert_eq!(ab(12), ReducedRatio::new(7, 3).unwrap());
        assert_eq!(ab(1), ReducedRatio::new(1, 1).unwrap());
        for n in 1..=1000u64 {
            let f = factorize(n).unwrap();
            let r = abundancy(&f).unwrap();
            let sigma = divisor_sigma(&f).unwrap();
            // cross-multiplication against the unreduced pair
            assert_eq!(sigma as u128 * r.den() as u128, n as u128 * r.num() as u128);
        }
    }

    #[test]
    fn reduced_ratio_orders_numerically() {
        let r = |a, b| ReducedRatio::new(a, b).unwrap();
        let mut v = vec![r(2, 1), r(3, 2), r(7, 3), r(1, 1), r(13, 12)];
        v.sort();
        assert_eq!(v, vec![r(1, 1), r(13, 12), r(3, 2), r(2, 1), r(7, 3)]);
        assert!(r(4, 2) == r(2, 1));
        assert!(ReducedRatio::new(1, 0).is_err());
        assert_eq!(r(0, 5), r(0, 9));
    }

    #[test]
    fn primality_known_cases() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime((1u64 << 61) - 1));
        assert!(is_prime(999_999_999_999_999_989));
        assert!(!is_prime(999_999_999_999_999_989 + 2));
        let spf = spf_small();
        for n in 2..10_000u64 {
            assert_eq!(is_prime(n), spf[n as usize] as u64 == n, "n={n}");
        }
    }

    #[test]
    fn zeta_reciprocal_reference_values() {
        let pi = std::f64::consts::PI;
        let z2 = zeta_reciprocal(2, 1e-7).unwrap();
        assert!((z2 - 6.0 / (pi * pi)).abs() < 1e-7, "z2={z2}");
        let z4 = zeta_reciprocal(4, 1e-9).unwrap();
        assert!((z4 - 90.0 / pi.powi(4)).abs() < 1e-9, "z4={z4}");
        // k = 20 is within a hair of 1
        let z20 = zeta_reciprocal(20, 1e-9).unwrap();
        assert!(z20 > 0.999_999 && z20 < 1.0);
        // coarse eps still lands within its budget
        let coarse = zeta_reciprocal(2, 1e-2).unwrap();
        assert!((coarse - 6.0 / (pi * pi)).abs() < 1e-2);
        assert!(zeta_reciprocal(1, 1e-3).is_err());
        assert!(zeta_reciprocal(2, 0.0).is_err());
        assert!(zeta_reciprocal(2, 1.0).is_err());
    }

    #[test]
    fn zeta_reciprocal_series_oracle() {
        // independent route: direct Dirichlet series with integral tail
        let series_zeta = |k: u32| -> f64 {
            let n = 1_000_000u64;
            let mut s = 0.0;
            for m in 1..=n {
                s += (m as f64).powi(-(k as i32));
            }
            s + (n as f64).powi(1 - k as i32) / (k as f64 - 1.0)
        };
        for k in 2..=6u32 {
            let z = zeta_reciprocal(k, 1e-8).unwrap();
            assert!((z - 1.0 / series_zeta(k)).abs() < 1e-6, "k={k}");
        }
    }
}
