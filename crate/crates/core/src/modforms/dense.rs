//! Dense integer power series used to build the level-one forms.

use num_bigint::BigInt;
use num_traits::Zero;

/// `prod_{n >= 1} (1 - q^(mn))` below `q^len`, as sparse `(exponent, coeff)`.
pub(crate) fn euler_product(m: usize, len: usize) -> Vec<(usize, BigInt)> {
    let mut out = vec![(0usize, BigInt::from(1))];
    for k in 1i64.. {
        let mut any = false;
        for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            let e = g as usize * m;
            if e < len {
                any = true;
                out.push((e, BigInt::from(if k % 2 == 0 { 1 } else { -1 })));
            }
        }
        if !any {
            break;
        }
    }
    out.sort_by_key(|(e, _)| *e);
    out
}

/// First `len` coefficients of `g^e`, where `g` is sparse with `g_0 = 1`.
/// Uses `n h_n = sum_{k=1}^n ((e + 1) k - n) g_k h_{n-k}`; the division is
/// exact because the result has integer coefficients.
pub(crate) fn sparse_unit_pow(g: &[(usize, BigInt)], e: i64, len: usize) -> Vec<BigInt> {
    debug_assert!(g
        .first()
        .is_some_and(|(k, c)| *k == 0 && *c == BigInt::from(1)));
    let mut h: Vec<BigInt> = Vec::with_capacity(len);
    if len == 0 {
        return h;
    }
    h.push(BigInt::from(1));
    for n in 1..len {
        let mut acc = BigInt::zero();
        for (k, gk) in g.iter().skip(1) {
            if *k > n {
                break;
            }
            let w = (e + 1) * *k as i64 - n as i64;
            if w != 0 && !h[n - k].is_zero() {
                acc += gk * &h[n - k] * w;
            }
        }
        h.push(acc / n as i64);
    }
    h
}

/// Product of two dense series, first `len` coefficients.
pub(crate) fn dense_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `sigma_k(n)` for `n < len` (index 0 is unused and set to zero).
pub(crate) fn divisor_sums(k: u32, len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        for n in (d..len).step_by(d) {
            s[n] += &dk;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_product(len: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); len];
        v[0] = 1.into();
        for n in 1..len {
            let mut f = vec![BigInt::zero(); len];
            f[0] = 1.into();
            f[n] = (-1).into();
            v = dense_mul(&v, &f, len);
        }
        v
    }

    #[test]
    fn pentagonal_matches_product() {
        let len = 40;
        let sparse = euler_product(1, len);
        let mut dense = vec![BigInt::zero(); len];
        for (e, c) in sparse {
            dense[e] = c;
        }
        assert_eq!(dense, naive_product(len));
    }

    #[test]
    fn powers_match_repeated_products() {
        let len = 25;
        let g = euler_product(1, len);
        let base = naive_product(len);
        let mut acc = base.clone();
        for _ in 1..5 {
            acc = dense_mul(&acc, &base, len);
        }
        assert_eq!(sparse_unit_pow(&g, 5, len), acc);
        let inv = sparse_unit_pow(&g, -1, len);
        let one = dense_mul(&inv, &base, len);
        assert_eq!(one[0], BigInt::from(1));
        assert!(one[1..].iter().all(Zero::is_zero));
    }
}
