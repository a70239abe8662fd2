//! Classical number theory for period finding.

use crate::error::{reject, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// `base^exp mod modulus`.
pub fn modpow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Smallest `r >= 1` with `a^r = 1 (mod n)`, by brute force.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n < 2 || gcd(a, n) != 1 {
        return None;
    }
    let mut x = a % n;
    for r in 1..=n {
        if x == 1 {
            return Some(r);
        }
        x = x * a % n;
    }
    None
}

/// Convergents `p/q` of the continued fraction of `y/q_total`, in order.
pub fn continued_fraction(y: u64, q_total: u64) -> Result<Vec<(u64, u64)>> {
    if q_total == 0 {
        return reject("continued fraction denominator must be positive");
    }
    if y >= q_total {
        return reject(format!("numerator {y} must be below {q_total}"));
    }
    let (mut num, mut den) = (y, q_total);
    let (mut p_prev, mut p) = (0u64, 1u64);
    let (mut q_prev, mut q) = (1u64, 0u64);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
        out.push((p, q));
        (num, den) = (den, num % den);
    }
    Ok(out)
}

/// Period guess from a measured `y`: the first convergent denominator below
/// `n` (or a small multiple of it) that satisfies `a^r = 1 (mod n)`.
pub fn period_from_measurement(y: u64, q_total: u64, a: u64, n: u64) -> Result<Option<u64>> {
    for &(_, q) in &continued_fraction(y, q_total)? {
        if q <= 1 || q >= n {
            continue;
        }
        let mut r = q;
        while r < n {
            if modpow(a, r, n) == 1 {
                return Ok(Some(r));
            }
            r += q;
        }
    }
    Ok(None)
}

/// Denominator of the last convergent below `n`, the usual reading of `y/Q`
/// as `m/r` with `r < n`.
pub fn denominator_below(y: u64, q_total: u64, n: u64) -> Result<u64> {
    Ok(continued_fraction(y, q_total)?
        .into_iter()
        .filter(|&(_, q)| q < n)
        .map(|(_, q)| q)
        .last()
        .unwrap_or(1))
}

/// Non-trivial factor pair from an even period, if the period yields one.
pub fn factors_from_period(a: u64, r: u64, n: u64) -> Option<(u64, u64)> {
    if r == 0 || r % 2 == 1 {
        return None;
    }
    let half = modpow(a, r / 2, n);
    if half == n - 1 {
        return None;
    }
    for cand in [gcd(half + n - 1, n), gcd(half + 1, n)] {
        if cand > 1 && cand < n {
            let (f, g) = (cand, n / cand);
            return Some((f.min(g), f.max(g)));
        }
    }
    None
}
