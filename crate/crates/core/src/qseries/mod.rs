//! Truncated Laurent series in `q^(1/M)` with cyclotomic coefficients.
//!
//! A series stores the coefficient of `q^(n/M)` under the integer key `n`.
//! The precision `K` is exclusive: every coefficient with key `< K` is known
//! exactly (keys below `low` are zero). A series with no precision bound is
//! exact (a Laurent polynomial).
//!
//! Every value is kept in canonical form: zero coefficients dropped, `low`
//! tightened to the leading key and `M` divided by the gcd of `M`, all keys
//! and `K`. Two series describing the same truncated function therefore
//! compare equal regardless of how they were built.

mod text;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::arith::lcm;
use crate::cyclotomic::{poly_mul, CycNumber};
use crate::error::{Error, Result};

pub use text::parse_series;

#[derive(Clone, Debug)]
pub struct QSeries {
    exp_denom: u64,
    level: u64,
    terms: BTreeMap<i64, CycNumber>,
    low: i64,
    prec: Option<i64>,
}

impl PartialEq for QSeries {
    /// Series at different coefficient levels are compared after embedding
    /// both into the lcm level.
    fn eq(&self, other: &Self) -> bool {
        if self.level != other.level {
            let l = lcm(self.level, other.level);
            return self.with_level(l).unwrap() == other.with_level(l).unwrap();
        }
        self.exp_denom == other.exp_denom
            && self.prec == other.prec
            && self.low == other.low
            && self.terms == other.terms
    }
}

impl Eq for QSeries {}

fn ratio(n: i64, d: u64) -> Rational64 {
    Rational64::new(n, d as i64)
}

impl QSeries {
    /// Build a series from `(key, coefficient)` pairs. Terms at or beyond
    /// `prec` are discarded.
    pub fn new(
        exp_denom: u64,
        level: u64,
        terms: impl IntoIterator<Item = (i64, CycNumber)>,
        prec: Option<i64>,
    ) -> Result<Self> {
        assert!(exp_denom >= 1 && level >= 1);
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if c.level() != level {
                return Err(Error::LevelMismatch(level, c.level()));
            }
            if prec.is_some_and(|p| k >= p) || c.is_zero() {
                continue;
            }
            map.insert(k, c);
        }
        Ok(Self::from_parts(exp_denom, level, map, prec))
    }

    fn from_parts(
        exp_denom: u64,
        level: u64,
        terms: BTreeMap<i64, CycNumber>,
        prec: Option<i64>,
    ) -> Self {
        let mut s = Self {
            exp_denom,
            level,
            terms,
            low: 0,
            prec,
        };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(p) = self.prec {
            self.terms.retain(|&k, _| k < p);
        }
        self.low = match (self.terms.keys().next(), self.prec) {
            (Some(&k), _) => k,
            (None, Some(p)) => p,
            (None, None) => 0,
        };
        let mut g = self.exp_denom as i64;
        for &k in self.terms.keys() {
            if g == 1 {
                break;
            }
            g = g.gcd(&k);
        }
        if let Some(p) = self.prec {
            g = g.gcd(&p);
        }
        if self.terms.is_empty() && self.prec.is_none() {
            g = self.exp_denom as i64;
        }
        if g > 1 {
            self.exp_denom /= g as u64;
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, c)| (k / g, c))
                .collect();
            self.low /= g;
            self.prec = self.prec.map(|p| p / g);
        }
    }

    /// Dense integer coefficients starting at key `first`.
    pub fn from_integers(exp_denom: u64, first: i64, coeffs: &[BigInt], prec: Option<i64>) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (first + i as i64, CycNumber::from_bigint(1, c.clone())));
        Self::new(exp_denom, 1, terms, prec).unwrap()
    }

    pub fn zero(level: u64) -> Self {
        Self::from_parts(1, level, BTreeMap::new(), None)
    }

    /// The zero series known up to (not including) `q^bound`.
    pub fn zero_to(level: u64, bound: Rational64) -> Self {
        let d = *bound.denom() as u64;
        Self::from_parts(d, level, BTreeMap::new(), Some(*bound.numer()))
    }

    pub fn constant(c: CycNumber) -> Self {
        let level = c.level();
        Self::from_parts(1, level, BTreeMap::from([(0, c)]), None)
    }

    pub fn one(level: u64) -> Self {
        Self::constant(CycNumber::one(level))
    }

    /// `c * q^(n/M)`, exact.
    pub fn monomial(c: CycNumber, n: i64, exp_denom: u64) -> Self {
        let level = c.level();
        Self::from_parts(exp_denom, level, BTreeMap::from([(n, c)]), None)
    }

    pub fn exp_denom(&self) -> u64 {
        self.exp_denom
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Stored nonzero coefficients keyed by numerator over `exp_denom`.
    pub fn terms(&self) -> &BTreeMap<i64, CycNumber> {
        &self.terms
    }

    pub fn low_key(&self) -> i64 {
        self.low
    }

    pub fn prec_key(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent of the first nonzero term.
    pub fn leading_exponent(&self) -> Option<Rational64> {
        self.terms.keys().next().map(|&k| ratio(k, self.exp_denom))
    }

    pub fn leading_coefficient(&self) -> Option<&CycNumber> {
        self.terms.values().next()
    }

    /// Lower bound of the support as an exponent (the precision bound for a
    /// zero series).
    pub fn low(&self) -> Rational64 {
        ratio(self.low, self.exp_denom)
    }

    /// Exclusive precision bound as an exponent; `None` for exact series.
    pub fn precision(&self) -> Option<Rational64> {
        self.prec.map(|p| ratio(p, self.exp_denom))
    }

    /// Coefficient of `q^e`, or an error when `e` lies beyond the window.
    pub fn coefficient(&self, e: Rational64) -> Result<CycNumber> {
        if self.precision().is_some_and(|p| e >= p) {
            return Err(Error::BeyondPrecision {
                exponent: e.to_string(),
            });
        }
        let scaled = e * Rational64::from_integer(self.exp_denom as i64);
        if !scaled.is_integer() {
            return Ok(CycNumber::zero(self.level));
        }
        Ok(self
            .terms
            .get(&scaled.to_integer())
            .cloned()
            .unwrap_or_else(|| CycNumber::zero(self.level)))
    }

    /// Coefficient of `q^n` for integer `n`.
    pub fn coefficient_at(&self, n: i64) -> Result<CycNumber> {
        self.coefficient(Rational64::from_integer(n))
    }

    /// Iterate `(exponent, coefficient)` in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (Rational64, &CycNumber)> {
        let m = self.exp_denom;
        self.terms.iter().map(move |(&k, c)| (ratio(k, m), c))
    }

    /// Re-express with a finer exponent denominator and a coefficient level
    /// divisible by the current ones. The result is not canonicalized.
    fn promoted(&self, exp_denom: u64, level: u64) -> Result<Self> {
        if !exp_denom.is_multiple_of(self.exp_denom) {
            return Err(Error::LevelNotDivisible {
                from: self.exp_denom,
                to: exp_denom,
            });
        }
        let f = (exp_denom / self.exp_denom) as i64;
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| Ok((k * f, c.embed_level(level)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self {
            exp_denom,
            level,
            terms,
            low: self.low * f,
            prec: self.prec.map(|p| p * f),
        })
    }

    /// Embed every coefficient into `Q(zeta_level)`.
    pub fn with_level(&self, level: u64) -> Result<Self> {
        let mut s = self.promoted(self.exp_denom, level)?;
        s.canonicalize();
        Ok(s)
    }

    /// Express every coefficient at a lower level, failing if one does not
    /// lie in that subfield.
    pub fn restrict_level(&self, level: u64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| Ok((k, c.restrict_level(level)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::from_parts(self.exp_denom, level, terms, self.prec))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.exp_denom, other.exp_denom);
        let l = lcm(self.level, other.level);
        (self.promoted(m, l).unwrap(), other.promoted(m, l).unwrap())
    }

    fn add_sub(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = self.common(other);
        let prec = match (a.prec, b.prec) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        let mut terms = a.terms;
        for (k, c) in b.terms {
            if prec.is_some_and(|p| k >= p) {
                continue;
            }
            let entry = terms.entry(k).or_insert_with(|| CycNumber::zero(a.level));
            *entry = if negate { &*entry - &c } else { &*entry + &c };
        }
        Self::from_parts(a.exp_denom, a.level, terms, prec)
    }

    /// Cauchy product, optionally computing only keys below `bound`
    /// (given as an exponent). The result precision is
    /// `min(f.low + g.prec, g.low + f.prec)`, further capped by `bound`.
    pub fn mul_truncated(&self, other: &Self, bound: Option<Rational64>) -> Self {
        let (mut a, mut b) = self.common(other);
        if let Some(bd) = bound {
            let d = *bd.denom() as u64;
            if a.exp_denom % d != 0 {
                let m = lcm(a.exp_denom, d);
                a = a.promoted(m, a.level).unwrap();
                b = b.promoted(m, b.level).unwrap();
            }
        }
        let m = a.exp_denom;
        let mut prec = match (a.prec, b.prec) {
            (Some(x), Some(y)) => Some((a.low + y).min(b.low + x)),
            (Some(x), None) => Some(b.low + x),
            (None, Some(y)) => Some(a.low + y),
            (None, None) => None,
        };
        if let Some(bd) = bound {
            let kb = (bd * Rational64::from_integer(m as i64)).to_integer();
            prec = Some(prec.map_or(kb, |p| p.min(kb)));
        }
        let terms = raw_product(a.level, &a.terms, &b.terms, prec);
        Self::from_parts(m, a.level, terms, prec)
    }

    pub fn square(&self) -> Self {
        self.mul_truncated(self, None)
    }

    /// Drop everything at or beyond `q^bound` and lower the precision.
    pub fn truncate(&self, bound: Rational64) -> Self {
        if self.precision().is_some_and(|p| p <= bound) {
            return self.clone();
        }
        let d = *bound.denom() as u64;
        let m = lcm(self.exp_denom, d);
        let mut s = self.promoted(m, self.level).unwrap();
        s.prec = Some((bound * Rational64::from_integer(m as i64)).to_integer());
        s.canonicalize();
        s
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        let l = lcm(self.level, c.level());
        let c = c.embed_level(l).unwrap();
        let s = self.promoted(self.exp_denom, l).unwrap();
        let terms = s.terms.into_iter().map(|(k, a)| (k, &a * &c)).collect();
        Self::from_parts(s.exp_denom, l, terms, s.prec)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&CycNumber::from_int(self.level, k))
    }

    /// Apply a coefficient map that preserves the level.
    pub fn map_coefficients(&self, mut f: impl FnMut(&CycNumber) -> CycNumber) -> Self {
        let terms = self.terms.iter().map(|(&k, c)| (k, f(c))).collect();
        Self::from_parts(self.exp_denom, self.level, terms, self.prec)
    }

    /// `f^e` by repeated squaring.
    pub fn pow(&self, e: u64) -> Self {
        self.pow_truncated(e, None)
    }

    /// `f^e` computed only below `q^bound`. Intermediate powers are cut to
    /// the window the remaining factors can still influence.
    pub fn pow_truncated(&self, e: u64, bound: Option<Rational64>) -> Self {
        if e == 0 {
            let one = Self::one(self.level);
            return match bound {
                Some(b) => one.truncate(b),
                None => one,
            };
        }
        // A partial product f^k still multiplies f^(e-k), whose support starts
        // at (e-k) * low, so only keys below bound - (e-k) * low matter.
        let low = self.low();
        let cap = |k: u64| bound.map(|b| b - low * Rational64::from_integer((e - k) as i64));
        let mut acc: Option<(Self, u64)> = None;
        let mut base = self.clone();
        let mut base_k = 1u64;
        let mut rest = e;
        loop {
            if rest & 1 == 1 {
                acc = Some(match acc {
                    None => (base.clone(), base_k),
                    Some((a, k)) => (a.mul_truncated(&base, cap(k + base_k)), k + base_k),
                });
            }
            rest >>= 1;
            if rest == 0 {
                break;
            }
            base = base.mul_truncated(&base, cap(2 * base_k));
            base_k *= 2;
        }
        let (res, _) = acc.unwrap();
        match bound {
            Some(b) => res.truncate(b),
            None => res,
        }
    }

    /// Multiplicative inverse of a series whose leading coefficient is
    /// nonzero. The inverse is known on a window of the same length.
    pub fn invert_unit(&self) -> Result<Self> {
        let Some((&l, c0)) = self.terms.iter().next() else {
            return Err(Error::NotInvertible(
                "zero leading coefficient within the window".into(),
            ));
        };
        let c0_inv = c0.inv()?;
        let level = self.level;
        let Some(p) = self.prec else {
            if self.terms.len() == 1 {
                return Ok(Self::monomial(c0_inv, -l, self.exp_denom));
            }
            return Err(Error::NotInvertible(
                "inverse of an exact non-monomial is infinite".into(),
            ));
        };
        let len = (p - l) as usize;
        let f: Vec<(usize, &CycNumber)> = self
            .terms
            .iter()
            .map(|(&k, c)| ((k - l) as usize, c))
            .collect();
        let mut g: Vec<CycNumber> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                g.push(c0_inv.clone());
                continue;
            }
            let mut acc = CycNumber::zero(level);
            for &(i, fi) in f.iter().skip(1) {
                if i > n {
                    break;
                }
                let gi = &g[n - i];
                if !gi.is_zero() {
                    acc = &acc + &(fi * gi);
                }
            }
            g.push(-(&acc * &c0_inv));
        }
        let terms = g.into_iter().enumerate().map(|(i, c)| (i as i64 - l, c));
        Self::new(self.exp_denom, level, terms, Some(p - 2 * l))
    }

    /// `tau -> f(tau / p)`: the key `n` now stands for `q^(n/(Mp))`.
    pub fn rescale_to_subtau(&self, p: u64) -> Self {
        let mut s = self.clone();
        s.exp_denom *= p;
        s.canonicalize();
        s
    }

    /// `tau -> f(m tau)`: every exponent is multiplied by `m`.
    pub fn substitute_up(&self, m: u64) -> Self {
        let mi = m as i64;
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k * mi, c.clone()))
            .collect();
        Self::from_parts(self.exp_denom, self.level, terms, self.prec.map(|p| p * mi))
    }

    /// `tau -> f((tau + k) / p)`: `a_n q^(n/M)` becomes
    /// `a_n zeta_(Mp)^(nk) q^(n/(Mp))`, with coefficients promoted to the
    /// level `lcm(L, Mp)`.
    pub fn twist_shift(&self, k: i64, p: u64) -> Self {
        let mp = self.exp_denom * p;
        let level = lcm(self.level, mp);
        let step = (level / mp) as i64;
        let terms = self
            .terms
            .iter()
            .map(|(&n, c)| {
                let root = CycNumber::zeta_pow(level, (n * k).rem_euclid(mp as i64) * step);
                (n, &c.embed_level(level).unwrap() * &root)
            })
            .collect();
        Self::from_parts(mp, level, terms, self.prec)
    }

    /// Apply `sigma_{L,d}` to every coefficient.
    pub fn galois_on_coeffs(&self, d: i64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| Ok((k, c.galois_apply(d)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        if self.level > 1 && (d.rem_euclid(self.level as i64) as u64).gcd(&self.level) != 1 {
            return Err(Error::NotCoprime {
                d,
                level: self.level,
            });
        }
        Ok(Self::from_parts(
            self.exp_denom,
            self.level,
            terms,
            self.prec,
        ))
    }

    /// `sum a_n^p q^(pn/M)`: coefficient-wise `p`-th power followed by
    /// `tau -> p tau`.
    pub fn frobenius_image(&self, p: u64) -> Self {
        self.map_coefficients(|c| c.pow(p)).substitute_up(p)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(CycNumber::is_integral)
    }

    /// Checks `f^p = sum a_n^p q^(pn/M) (mod p)` on the window where both
    /// sides are determined. Requires integral coefficients.
    pub fn pth_power_frobenius_check(&self, p: u64) -> Result<bool> {
        if let Some(c) = self.terms.values().find(|c| !c.is_integral()) {
            return Err(Error::NotIntegral(c.denom().to_string()));
        }
        let diff = &self.pow(p) - &self.frobenius_image(p);
        for c in diff.terms.values() {
            if !c.is_p_divisible(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First coefficient (in exponent order) failing `pred`.
    pub fn find_coefficient(
        &self,
        mut pred: impl FnMut(&CycNumber) -> bool,
    ) -> Option<(Rational64, &CycNumber)> {
        self.iter().find(|(_, c)| pred(c))
    }
}

/// Raw Cauchy product on integral numerators: products are accumulated
/// unreduced and reduced modulo `Phi_L` once per output key.
fn raw_product(
    level: u64,
    f: &BTreeMap<i64, CycNumber>,
    g: &BTreeMap<i64, CycNumber>,
    bound: Option<i64>,
) -> BTreeMap<i64, CycNumber> {
    let mut out = BTreeMap::new();
    if f.is_empty() || g.is_empty() {
        return out;
    }
    let (df, fnum) = integral_numerators(f);
    let (dg, gnum) = integral_numerators(g);
    let denom = &df * &dg;
    let flow = fnum[0].0;
    let glow = gnum[0].0;
    let top = match bound {
        Some(b) => b,
        None => fnum.last().unwrap().0 + gnum.last().unwrap().0 + 1,
    };
    if top <= flow + glow {
        return out;
    }
    let width = (top - flow - glow) as usize;
    let mut acc: Vec<Option<Vec<BigInt>>> = vec![None; width];
    for (i, a) in &fnum {
        if i + glow >= top {
            break;
        }
        for (j, b) in &gnum {
            let key = i + j;
            if key >= top {
                break;
            }
            let prod = poly_mul(a, b);
            let slot = &mut acc[(key - flow - glow) as usize];
            match slot {
                None => *slot = Some(prod),
                Some(v) => {
                    for (x, y) in v.iter_mut().zip(prod) {
                        *x += y;
                    }
                }
            }
        }
    }
    for (idx, v) in acc.into_iter().enumerate() {
        if let Some(v) = v {
            let c = CycNumber::new(level, v, denom.clone()).unwrap();
            if !c.is_zero() {
                out.insert(flow + glow + idx as i64, c);
            }
        }
    }
    out
}

/// Common denominator of all coefficients and the scaled integral numerators.
fn integral_numerators(terms: &BTreeMap<i64, CycNumber>) -> (BigInt, Vec<(i64, Vec<BigInt>)>) {
    let mut d = BigInt::one();
    for c in terms.values() {
        if !c.denom().is_one() {
            d = d.lcm(c.denom());
        }
    }
    let nums = terms
        .iter()
        .map(|(&k, c)| {
            let v = if d.is_one() {
                c.coords().to_vec()
            } else {
                let f = &d / c.denom();
                c.coords().iter().map(|x| x * &f).collect()
            };
            (k, v)
        })
        .collect();
    (d, nums)
}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.add_sub(rhs, false)
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.add_sub(rhs, true)
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.map_coefficients(|c| -c)
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn int_series(first: i64, coeffs: &[i64], prec: Option<i64>) -> QSeries {
        let c: Vec<BigInt> = coeffs.iter().map(|&x| x.into()).collect();
        QSeries::from_integers(1, first, &c, prec)
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn two_term_product() {
        let f = int_series(-1, &[1, 744], Some(1));
        let g = QSeries::monomial(CycNumber::one(1), 1, 1);
        let h = &f * &g;
        assert_eq!(h, int_series(0, &[1, 744], Some(2)));
        let exact = int_series(-1, &[1, 744], None);
        assert_eq!(&exact * &g, int_series(0, &[1, 744], None));
    }

    #[test]
    fn additive_identity() {
        let f = int_series(-1, &[1, 744, 196884], Some(2));
        assert_eq!(&f + &QSeries::zero(1), f);
    }

    #[test]
    fn inverse_examples() {
        let q = QSeries::monomial(CycNumber::one(1), 1, 1);
        assert_eq!(
            q.invert_unit().unwrap(),
            QSeries::monomial(CycNumber::one(1), -1, 1)
        );
        let f = int_series(0, &[1, -1], Some(6));
        assert_eq!(
            f.invert_unit().unwrap(),
            int_series(0, &[1, 1, 1, 1, 1, 1], Some(6))
        );
        assert!(QSeries::zero_to(1, r(3, 1)).invert_unit().is_err());
    }

    #[test]
    fn precision_propagation() {
        let f = int_series(-1, &[1, 2, 3], Some(2));
        let g = int_series(1, &[1, 5], Some(3));
        let h = &f * &g;
        assert_eq!(h.precision(), Some(r(2, 1)));
        assert_eq!((&f + &g).precision(), Some(r(2, 1)));
    }

    #[test]
    fn substitutions() {
        let j = int_series(-1, &[1, 744, 196884, 21493760], Some(3));
        let j2 = j.substitute_up(2);
        assert_eq!(j2.coefficient_at(-2).unwrap(), CycNumber::one(1));
        assert_eq!(
            j2.coefficient_at(2).unwrap(),
            CycNumber::from_int(1, 196884)
        );
        assert_eq!(j2.coefficient_at(-1).unwrap(), CycNumber::zero(1));
        let jh = j.rescale_to_subtau(2);
        assert_eq!(jh.leading_exponent(), Some(r(-1, 2)));
        assert_eq!(
            jh.coefficient(r(0, 1)).unwrap(),
            CycNumber::from_int(1, 744)
        );
        assert_eq!(jh.rescale_to_subtau(3).exp_denom(), 6);
        assert_eq!(jh.substitute_up(2), j);
        let c = QSeries::constant(CycNumber::from_int(1, 5));
        assert_eq!(c.rescale_to_subtau(7), c);
        let half = QSeries::monomial(CycNumber::one(1), 1, 2);
        assert_eq!(
            half.substitute_up(2),
            QSeries::monomial(CycNumber::one(1), 1, 1)
        );
    }

    #[test]
    fn twists() {
        let q = QSeries::monomial(CycNumber::one(1), 1, 1);
        assert_eq!(q.twist_shift(0, 2), q.rescale_to_subtau(2));
        let t = q.twist_shift(1, 2);
        assert_eq!(t, QSeries::monomial(CycNumber::from_int(1, -1), 1, 2));
    }

    #[test]
    fn galois_on_series() {
        let f = QSeries::monomial(CycNumber::zeta(5), 1, 1);
        assert_eq!(
            f.galois_on_coeffs(2).unwrap(),
            QSeries::monomial(CycNumber::zeta_pow(5, 2), 1, 1)
        );
        let rat = int_series(-1, &[1, 744], Some(3));
        assert_eq!(rat.galois_on_coeffs(7).unwrap(), rat);
        assert!(f.galois_on_coeffs(5).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let f = int_series(-1, &[1, 744], None);
        let diff = &f.pow(2) - &f.frobenius_image(2);
        assert_eq!(diff, QSeries::monomial(CycNumber::from_int(1, 1488), -1, 1));
        assert!(f.pth_power_frobenius_check(2).unwrap());
        let g = &QSeries::one(3) + &QSeries::monomial(CycNumber::zeta(3), 1, 1);
        assert!(g.pth_power_frobenius_check(2).unwrap());
        let m = QSeries::monomial(CycNumber::zeta(7), 3, 4);
        assert!((&m.pow(3) - &m.frobenius_image(3)).is_zero());
        let bad = QSeries::constant(CycNumber::from_ratio(1, 1, 2).unwrap());
        assert!(bad.pth_power_frobenius_check(3).is_err());
    }

    #[test]
    fn truncated_power_matches_full() {
        let f = int_series(-2, &[1, 3, -1, 4, 1, -5, 9, 2], Some(6));
        let full = f.pow(5);
        let cut = f.pow_truncated(5, Some(r(-7, 1)));
        assert_eq!(full.truncate(r(-7, 1)), cut);
    }

    #[test]
    fn canonical_denominators() {
        let f = QSeries::new(
            6,
            1,
            vec![(-6, CycNumber::one(1)), (12, CycNumber::one(1))],
            Some(18),
        )
        .unwrap();
        assert_eq!(f.exp_denom(), 1);
        assert_eq!(f.prec_key(), Some(3));
    }
}
