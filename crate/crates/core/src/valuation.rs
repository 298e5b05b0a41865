//! Valuations `v_P` on `Q(zeta_M)` at primes `P` above an unramified `p`, and
//! the series valuation `w_P(g) = min v_P(a_n)`.
//!
//! A prime above `p` corresponds to an irreducible factor `h` of `Phi_M`
//! modulo `p`. After lifting `h` to `h_k` dividing `Phi_M` modulo `p^k`, the
//! completion at `P` is represented by `Z[x]/(p^k, h_k)`, where `p` is a
//! uniformizer and `1, x, ..., x^(f-1)` is an integral basis.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, multiplicative_order};
use crate::cyclotomic::{cyclotomic_polynomial, CycNumber};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// An element of `Z ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn plus(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.cmp(b),
            (Self::Finite(_), Self::Infinite) => Ordering::Less,
            (Self::Infinite, Self::Finite(_)) => Ordering::Greater,
            (Self::Infinite, Self::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Fp {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> Fp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    trim(out.into_iter().map(|x| x as u64).collect())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::inverse_mod(a as i64, p).expect("nonzero residue modulo a prime")
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Fp, Fp) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        q[shift] = c;
        for (i, &y) in b.iter().enumerate() {
            let t = (c as u128 * y as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn fp_monic(a: Fp, p: u64) -> Fp {
    let inv = inv_mod(*a.last().unwrap(), p);
    a.into_iter()
        .map(|x| (x as u128 * inv as u128 % p as u128) as u64)
        .collect()
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Fp {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = fp_divrem(&x, &y, p).1;
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        fp_monic(x, p)
    }
}

/// `s, t` with `s a + t b = 1` for coprime `a, b`.
fn fp_bezout(a: &[u64], b: &[u64], p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    assert_eq!(r0.len(), 1, "Bezout inputs must be coprime");
    let inv = inv_mod(r0[0], p);
    let scale = |v: Fp| {
        trim(
            v.into_iter()
                .map(|x| (x as u128 * inv as u128 % p as u128) as u64)
                .collect(),
        )
    };
    (scale(s0), scale(t0))
}

fn fp_powmod(base: &[u64], e: &BigUint, modulus: &[u64], p: u64) -> Fp {
    let mut result = vec![1u64];
    let base = fp_divrem(base, modulus, p).1;
    for i in (0..e.bits()).rev() {
        result = fp_divrem(&fp_mul(&result, &result, p), modulus, p).1;
        if e.bit(i) {
            result = fp_divrem(&fp_mul(&result, &base, p), modulus, p).1;
        }
    }
    result
}

/// Split a squarefree product of irreducibles of common degree `f`.
fn equal_degree_split(g: Fp, f: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Fp>) {
    let n = g.len() - 1;
    if n == f {
        out.push(g);
        return;
    }
    loop {
        let a: Fp = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.is_empty() {
            continue;
        }
        let cand = if p == 2 {
            // trace of a from F_(2^f) to F_2
            let mut t = a.clone();
            let mut x = a.clone();
            for _ in 1..f {
                x = fp_divrem(&fp_mul(&x, &x, p), &g, p).1;
                t = fp_add(&t, &x, p);
            }
            t
        } else {
            let e = (BigUint::from(p).pow(f as u32) - 1u32) / 2u32;
            fp_sub(&fp_powmod(&a, &e, &g, p), &[1], p)
        };
        let d = fp_gcd(&cand, &g, p);
        let deg = d.len().saturating_sub(1);
        if deg > 0 && deg < n {
            let other = fp_monic(fp_divrem(&g, &d, p).0, p);
            equal_degree_split(d, f, p, rng, out);
            equal_degree_split(other, f, p, rng, out);
            return;
        }
    }
}

/// A prime of `Q(zeta_M)` above an unramified `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdealData {
    p: u64,
    m: u64,
    residue_degree: usize,
    factor_mod_p: Vec<u64>,
    cofactor_mod_p: Vec<u64>,
    factor: Vec<BigInt>,
    lift_precision: u32,
}

impl PrimeIdealData {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    pub fn residue_degree(&self) -> usize {
        self.residue_degree
    }

    /// `h mod p`, monic, coefficients in `[0, p)`, lowest degree first.
    pub fn factor_mod_p(&self) -> &[u64] {
        &self.factor_mod_p
    }

    /// The lift `h_k`, coefficients in `[0, p^k)`.
    pub fn factor(&self) -> &[BigInt] {
        &self.factor
    }

    pub fn lift_precision(&self) -> u32 {
        self.lift_precision
    }

    /// The same prime with `h` lifted to precision `k`.
    pub fn lifted(&self, k: u32) -> Self {
        let mut out = self.clone();
        out.factor = hensel_lift(self.m, &self.factor_mod_p, &self.cofactor_mod_p, self.p, k);
        out.lift_precision = k;
        out
    }

    /// `v_P(a)`; fails when the answer is not below the lift precision.
    pub fn valuation(&self, a: &CycNumber) -> Result<Valuation> {
        if a.level() != self.m {
            return Err(Error::LevelMismatch(self.m, a.level()));
        }
        if a.is_zero() {
            return Ok(Valuation::Infinite);
        }
        let pk = BigInt::from(self.p).pow(self.lift_precision);
        let rem = reduce_mod_factor(a.coords(), &self.factor, &pk);
        let pb = BigInt::from(self.p);
        let v = rem
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| p_order(c, &pb))
            .min()
            .ok_or(Error::ValuationPrecisionExhausted(self.lift_precision))?;
        Ok(Valuation::Finite(v as i64 - p_order(a.denom(), &pb) as i64))
    }

    /// `v_P(a)`, lifting further whenever the precision runs out.
    pub fn valuation_auto(&self, a: &CycNumber) -> Result<Valuation> {
        let mut prime = self.clone();
        loop {
            match prime.valuation(a) {
                Err(Error::ValuationPrecisionExhausted(k)) => prime = prime.lifted(2 * k),
                other => return other,
            }
        }
    }

    /// The residue `h mod p` as text in `x`.
    pub fn factor_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.factor_mod_p.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for PrimeIdealData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.factor_string())
    }
}

fn p_order(n: &BigInt, p: &BigInt) -> u64 {
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

fn modp(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

/// `a mod (modulus, h)` for monic `h`, coefficients reduced into `[0, modulus)`.
fn reduce_mod_factor(a: &[BigInt], h: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let f = h.len() - 1;
    let mut r: Vec<BigInt> = a.iter().map(|c| modp(c, modulus)).collect();
    for d in (f..r.len()).rev() {
        let c = std::mem::take(&mut r[d]);
        if c.is_zero() {
            continue;
        }
        for (i, hi) in h[..f].iter().enumerate() {
            let slot = &mut r[d - f + i];
            *slot = modp(&(&*slot - &c * hi), modulus);
        }
    }
    r.truncate(f);
    r
}

fn to_big(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    crate::cyclotomic::poly_mul(a, b)
}

/// Lift `Phi_M = h g (mod p)` to `h_k` with `h_k | Phi_M (mod p^k)`, one
/// power of `p` per step.
fn hensel_lift(m: u64, h: &[u64], g: &[u64], p: u64, k: u32) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(m);
    let (s, t) = fp_bezout(h, g, p);
    let pb = BigInt::from(p);
    let (mut hk, mut gk) = (to_big(h), to_big(g));
    let mut pi = pb.clone();
    for _ in 1..k {
        let prod = int_mul(&hk, &gk);
        let mut e: Vec<u64> = Vec::with_capacity(phi.len());
        for (i, c) in phi.iter().enumerate() {
            let d = c - prod.get(i).cloned().unwrap_or_default();
            debug_assert!(d.is_multiple_of(&pi));
            e.push(modp(&(d / &pi), &pb).to_u64().unwrap());
        }
        let e = trim(e);
        // t e = q h + r, and e = (s e + q g) h + r g (mod p)
        let (q, r) = fp_divrem(&fp_mul(&t, &e, p), h, p);
        let dg = fp_add(&fp_mul(&s, &e, p), &fp_mul(&q, g, p), p);
        let next = &pi * &pb;
        for (i, c) in r.iter().enumerate() {
            hk[i] = modp(&(&hk[i] + &pi * c), &next);
        }
        for (i, c) in dg.iter().enumerate() {
            if i >= gk.len() {
                gk.push(BigInt::zero());
            }
            gk[i] = modp(&(&gk[i] + &pi * c), &next);
        }
        pi = next;
    }
    hk
}

/// All primes of `Q(zeta_M)` above `p`, with factors lifted to precision `k`.
pub fn primes_above(p: u64, m: u64, k: u32) -> Result<Vec<PrimeIdealData>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m.is_multiple_of(p) {
        return Err(Error::PrimeDividesLevel { p, level: m });
    }
    assert!(k >= 1, "lift precision must be positive");
    let f = multiplicative_order(p, m) as usize;
    let phi: Fp = trim(
        cyclotomic_polynomial(m)
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(p.wrapping_mul(1_000_003).wrapping_add(m));
    let mut factors = Vec::new();
    equal_degree_split(phi.clone(), f, p, &mut rng, &mut factors);
    factors.sort();
    let out = factors
        .into_iter()
        .map(|h| {
            let g = fp_divrem(&phi, &h, p).0;
            PrimeIdealData {
                p,
                m,
                residue_degree: f,
                factor: hensel_lift(m, &h, &g, p, k),
                factor_mod_p: h,
                cofactor_mod_p: g,
                lift_precision: k,
            }
        })
        .collect();
    Ok(out)
}

/// `v_P(a)`.
#[allow(non_snake_case)]
pub fn vP_element(a: &CycNumber, prime: &PrimeIdealData) -> Result<Valuation> {
    prime.valuation(a)
}

/// `w_P(g)`: the minimum of `v_P` over the coefficients in the window.
/// Coefficients must be algebraic integers at a level dividing `P`'s level.
#[allow(non_snake_case)]
pub fn wP_series(g: &QSeries, prime: &PrimeIdealData) -> Result<Valuation> {
    if !prime.level().is_multiple_of(g.level()) {
        return Err(Error::LevelMismatch(prime.level(), g.level()));
    }
    let mut best = Valuation::Infinite;
    for c in g.terms().values() {
        if !c.is_integral() {
            return Err(Error::NotIntegral(c.denom().to_string()));
        }
        let c = c.embed_level(prime.level())?;
        let v = match prime.valuation(&c) {
            // at least k, so it only matters when nothing smaller was seen
            Err(Error::ValuationPrecisionExhausted(k)) if best < Valuation::Finite(k as i64) => {
                continue
            }
            Err(Error::ValuationPrecisionExhausted(_)) => prime.valuation_auto(&c)?,
            other => other?,
        };
        best = best.min(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::delta_tilde;

    #[test]
    fn factor_counts() {
        let ps = primes_above(11, 5, 8).unwrap();
        assert_eq!(ps.len(), 4);
        assert!(ps.iter().all(|q| q.residue_degree() == 1));
        let roots: Vec<u64> = ps.iter().map(|q| (11 - q.factor_mod_p()[0]) % 11).collect();
        assert_eq!(roots, vec![9, 5, 4, 3]);
        for r in roots {
            assert_eq!((1..=5).fold(1, |acc, _| acc * r % 11), 1);
        }
        let ps = primes_above(3, 4, 8).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].factor_string(), "x^2 + 1");
        let ps = primes_above(2, 1, 8).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(primes_above(5, 5, 8).is_err());
        for (p, m) in [(2u64, 7u64), (2, 15), (3, 13), (7, 12), (2, 21)] {
            let ps = primes_above(p, m, 4).unwrap();
            let f = multiplicative_order(p, m) as usize;
            assert_eq!(
                ps.len() * f,
                crate::arith::euler_phi(m) as usize,
                "p={p} M={m}"
            );
        }
    }

    #[test]
    fn lifted_factor_divides() {
        let ps = primes_above(2, 7, 6).unwrap();
        let phi = cyclotomic_polynomial(7);
        let m = BigInt::from(64);
        for q in ps {
            assert!(reduce_mod_factor(&phi, q.factor(), &m)
                .iter()
                .all(Zero::is_zero));
        }
    }

    #[test]
    fn element_valuations() {
        for q in primes_above(11, 5, 8).unwrap() {
            assert_eq!(
                q.valuation(&CycNumber::zero(5)).unwrap(),
                Valuation::Infinite
            );
            assert_eq!(
                q.valuation(&CycNumber::from_int(5, 11)).unwrap(),
                Valuation::Finite(1)
            );
            assert_eq!(
                q.valuation(&CycNumber::from_ratio(5, 3, 121).unwrap())
                    .unwrap(),
                Valuation::Finite(-2)
            );
        }
        let ps = primes_above(11, 5, 8).unwrap();
        let r = (11 - ps[0].factor_mod_p()[0]) as i64;
        let a = &CycNumber::zeta(5) - &CycNumber::from_int(5, r);
        assert!(ps[0].valuation(&a).unwrap() >= Valuation::Finite(1));
        for q in &ps[1..] {
            assert_eq!(q.valuation(&a).unwrap(), Valuation::Finite(0));
        }
    }

    #[test]
    fn exhaustion_and_auto_lift() {
        let q = primes_above(3, 1, 2).unwrap().remove(0);
        let a = CycNumber::from_int(1, 81);
        assert_eq!(q.valuation(&a), Err(Error::ValuationPrecisionExhausted(2)));
        assert_eq!(q.valuation_auto(&a).unwrap(), Valuation::Finite(4));
    }

    #[test]
    fn series_valuations() {
        let d = delta_tilde(30).with_level(5).unwrap();
        for q in primes_above(11, 5, 8).unwrap() {
            assert_eq!(wP_series(&d, &q).unwrap(), Valuation::Finite(0));
            assert_eq!(
                wP_series(&d.scale_int(11), &q).unwrap(),
                Valuation::Finite(1)
            );
            assert_eq!(
                wP_series(&QSeries::zero(5), &q).unwrap(),
                Valuation::Infinite
            );
        }
        assert_eq!(
            primes_above(11, 5, 8).unwrap()[0].to_string(),
            "(11, x + 2)"
        );
    }
}
