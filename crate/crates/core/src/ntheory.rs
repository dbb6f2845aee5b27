//! Small-integer number theory used by prime selection and the oracles.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes strictly greater than `floor`, ascending.
pub fn primes_above(floor: u64) -> impl Iterator<Item = u64> {
    (floor.saturating_add(1)..).filter(|&n| is_prime(n))
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut acc: u128 = 1;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i128, m: u64) -> Option<u64> {
    let m = m as i128;
    let a = a.rem_euclid(m);
    let e = a.extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m) as u64)
}

/// Least e >= 1 with a^e = 1 mod q. Requires gcd(a, q) = 1.
pub fn multiplicative_order(a: i128, q: u64) -> Option<u64> {
    if q == 1 {
        return Some(1);
    }
    let a = a.rem_euclid(q as i128) as u64;
    if a.gcd(&q) != 1 {
        return None;
    }
    let mut x = a;
    let mut e = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % q as u128) as u64;
        e += 1;
        if e > q {
            return None;
        }
    }
    Some(e)
}

/// lcm(1, 2, ..., r); None once it leaves u64 (r >= 47).
pub fn lcm_upto(r: u64) -> Option<u64> {
    (1..=r).try_fold(1u64, |acc, k| (acc / acc.gcd(&k)).checked_mul(k))
}

pub fn lcm_upto_big(r: u64) -> num_bigint::BigInt {
    (1..=r).fold(num_bigint::BigInt::from(1), |acc, k| acc.lcm(&k.into()))
}

/// Product of the distinct prime factors of n.
pub fn radical(mut n: u64) -> u64 {
    let mut rad = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            rad *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        rad *= n;
    }
    rad
}

/// If n = p^k for a prime p and k >= 1, returns (p, k).
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
