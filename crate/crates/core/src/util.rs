//! Small integer helpers shared across the crate.

/// Binary gcd. gcd(0, 0) = 0.
pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Floor of the square root, exact for all u64.
pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // f64 sqrt is within 1 ulp; correct the candidate in both directions.
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// Floor of the k-th root, exact for all u64 and k >= 1.
pub(crate) fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n <= 1 {
        return n;
    }
    if k == 2 {
        return isqrt(n);
    }
    if k >= 64 {
        return 1;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u64 + 1;
    while pow_exceeds(r, k, n) {
        r -= 1;
    }
    r
}

/// True when r^k > n, computed without overflow.
fn pow_exceeds(r: u64, k: u32, n: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = match acc.checked_mul(r) {
            Some(v) => v,
            None => return true,
        };
        if acc > n {
            return true;
        }
    }
    acc > n
}
