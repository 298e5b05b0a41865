//! Small-integer number theory used across the crate.

use num_integer::Integer;

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    factorize(n) == vec![(n, 1)]
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..=n)
        .take_while(|d| d * d <= n)
        .filter(|d| n.is_multiple_of(*d))
        .collect();
    let mut hi: Vec<u64> = ds.iter().filter(|&&d| d * d != n).map(|&d| n / d).collect();
    hi.reverse();
    ds.extend(hi);
    ds
}

pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Least `k >= 1` with `p^k = 1 (mod m)`; 1 when `m = 1`.
pub fn multiplicative_order(p: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    assert_eq!(p.gcd(&m), 1, "order of a non-unit");
    let mut x = p % m;
    let mut k = 1;
    while x != 1 {
        x = x * p % m;
        k += 1;
    }
    k
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Representative of `a mod m` in `[0, m)`.
pub fn modulo(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a.rem_euclid(m as i64)).extended_gcd(&(m as i64));
    if e.gcd != 1 {
        None
    } else {
        Some(modulo(e.x, m))
    }
}

/// `|SL_2(Z/mZ)| = m^3 prod_{l | m} (1 - l^-2)`.
pub fn sl2_order(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .fold(m * m * m, |acc, (l, _)| acc / (l * l) * (l * l - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(55), 40);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(multiplicative_order(3, 4), 2);
        assert_eq!(multiplicative_order(11, 5), 1);
        assert_eq!(sl2_order(2), 6);
        assert_eq!(sl2_order(3), 24);
        assert_eq!(sl2_order(6), 144);
        assert_eq!(sl2_order(12), 1152);
        assert_eq!(inverse_mod(2, 5), Some(3));
        assert_eq!(inverse_mod(2, 4), None);
    }
}
