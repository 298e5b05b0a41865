//! Exact arithmetic in `Q(zeta_M)`.
//!
//! Elements are stored in the power basis `1, z, ..., z^(phi(M)-1)` of
//! `Z[zeta_M]` with one common positive denominator. Since the power basis
//! is an integral basis, `a` lies in `p Z[zeta_M]` exactly when every
//! coordinate of its numerator is divisible by `p`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{divisors, euler_phi, lcm, mobius, modulo};
use crate::error::{Error, Result};

/// The `m`-th cyclotomic polynomial, coefficients from the constant term up.
///
/// Computed as `prod_{d | m} (x^(m/d) - 1)^mu(d)`: multiply out the factors
/// with `mu = 1`, then divide exactly by those with `mu = -1`.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic polynomial of level 0");
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in divisors(m) {
        let binom = x_pow_minus_one((m / d) as usize);
        match mobius(d) {
            1 => num = poly_mul(&num, &binom),
            -1 => den = poly_mul(&den, &binom),
            _ => {}
        }
    }
    let (q, r) = poly_divrem_monic(&num, &den);
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

fn x_pow_minus_one(n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n + 1];
    v[0] = -BigInt::one();
    v[n] = BigInt::one();
    v
}

pub(crate) fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Division by a monic integer polynomial; returns `(quotient, remainder)`.
pub(crate) fn poly_divrem_monic(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = std::mem::take(&mut r[i + db]);
        if c.is_zero() {
            continue;
        }
        for (t, bt) in b.iter().enumerate().take(db) {
            if !bt.is_zero() {
                r[i + t] -= &c * bt;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (q, r)
}

/// Reduction data for one level, shared by every element of that level.
#[derive(Debug)]
struct FieldData {
    degree: usize,
    /// Nonzero coefficients of `Phi_M` below the leading term.
    tail: Vec<(usize, i64)>,
}

fn field_data(level: u64) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FieldData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&level) {
        return f.clone();
    }
    let phi = cyclotomic_polynomial(level);
    let degree = phi.len() - 1;
    let tail = phi[..degree]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.to_i64().expect("cyclotomic coefficient fits in i64")))
        .collect();
    let data = Arc::new(FieldData { degree, tail });
    cache.lock().unwrap().insert(level, data.clone());
    data
}

/// Reduce an integer polynomial in `z` modulo `Phi_M`, in place, leaving
/// exactly `phi(M)` coordinates.
fn reduce_mod_phi(level: u64, mut poly: Vec<BigInt>) -> Vec<BigInt> {
    let fd = field_data(level);
    let n = fd.degree;
    if poly.len() > n {
        for d in (n..poly.len()).rev() {
            let c = std::mem::take(&mut poly[d]);
            if c.is_zero() {
                continue;
            }
            for &(t, coef) in &fd.tail {
                let slot = &mut poly[d - n + t];
                match coef {
                    1 => *slot -= &c,
                    -1 => *slot += &c,
                    _ => *slot -= &c * coef,
                }
            }
        }
    }
    poly.resize(n, BigInt::zero());
    poly
}

/// An element of `Q(zeta_M)`, normalized so that
/// `gcd(coords, denom) = 1` and `denom >= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNumber {
    level: u64,
    coords: Vec<BigInt>,
    denom: BigInt,
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNumber({self})")
    }
}

impl CycNumber {
    /// Build from raw coordinates (any length; reduced modulo `Phi_M`) and a
    /// nonzero denominator.
    pub fn new(level: u64, coords: Vec<BigInt>, denom: BigInt) -> Result<Self> {
        assert!(level >= 1, "level must be positive");
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let coords = reduce_mod_phi(level, coords);
        Ok(Self::normalized(level, coords, denom))
    }

    fn normalized(level: u64, mut coords: Vec<BigInt>, mut denom: BigInt) -> Self {
        if denom.is_negative() {
            denom = -denom;
            for c in coords.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if coords.iter().all(Zero::is_zero) {
            return Self {
                level,
                coords,
                denom: BigInt::one(),
            };
        }
        if !denom.is_one() {
            let mut g = denom.clone();
            for c in &coords {
                if g.is_one() {
                    break;
                }
                g = g.gcd(c);
            }
            if !g.is_one() {
                denom /= &g;
                for c in coords.iter_mut() {
                    *c /= &g;
                }
            }
        }
        Self {
            level,
            coords,
            denom,
        }
    }

    pub fn zero(level: u64) -> Self {
        let n = field_data(level).degree;
        Self {
            level,
            coords: vec![BigInt::zero(); n],
            denom: BigInt::one(),
        }
    }

    pub fn one(level: u64) -> Self {
        Self::from_int(level, 1)
    }

    pub fn from_int(level: u64, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(level);
        z.coords[0] = n.into();
        z
    }

    pub fn from_bigint(level: u64, n: BigInt) -> Self {
        Self::from_int(level, n)
    }

    pub fn from_ratio(level: u64, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let mut z = Self::zero(level);
        z.coords[0] = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(level, z.coords, den))
    }

    /// `zeta_M^e` for any integer `e`.
    pub fn zeta_pow(level: u64, e: i64) -> Self {
        let e = modulo(e, level) as usize;
        let mut v = vec![BigInt::zero(); e + 1];
        v[e] = BigInt::one();
        Self {
            level,
            coords: reduce_mod_phi(level, v),
            denom: BigInt::one(),
        }
    }

    pub fn zeta(level: u64) -> Self {
        Self::zeta_pow(level, 1)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    /// Numerator coordinates in the power basis.
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.denom.is_one() && self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// True when the element lies in `Z[zeta_M]`.
    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.coords[0].clone(), self.denom.clone()))
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<&BigInt> {
        (self.is_rational() && self.denom.is_one()).then(|| &self.coords[0])
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            Err(Error::LevelMismatch(self.level, other.level))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.add_sub(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.add_sub(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    fn add_sub(&self, other: &Self, negate: bool) -> Self {
        let level = self.level;
        if self.denom == other.denom {
            let coords = self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect();
            return Self::normalized(level, coords, self.denom.clone());
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let l = a * &other.denom;
                let r = b * &self.denom;
                if negate {
                    l - r
                } else {
                    l + r
                }
            })
            .collect();
        Self::normalized(level, coords, &self.denom * &other.denom)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.level);
        }
        if other.is_rational() {
            return self.scale_rational(&other.coords[0], &other.denom);
        }
        if self.is_rational() {
            return other.scale_rational(&self.coords[0], &self.denom);
        }
        let prod = poly_mul(&self.coords, &other.coords);
        let coords = reduce_mod_phi(self.level, prod);
        Self::normalized(self.level, coords, &self.denom * &other.denom)
    }

    fn scale_rational(&self, num: &BigInt, den: &BigInt) -> Self {
        let coords = self.coords.iter().map(|c| c * num).collect();
        Self::normalized(self.level, coords, &self.denom * den)
    }

    /// Multiply by a rational integer.
    pub fn scale(&self, k: &BigInt) -> Self {
        self.scale_rational(k, &BigInt::one())
    }

    /// Exact inverse via the extended gcd of the numerator with `Phi_M` over `Q`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::normalized(
                self.level,
                {
                    let mut c = vec![BigInt::zero(); self.coords.len()];
                    c[0] = self.denom.clone();
                    c
                },
                self.coords[0].clone(),
            ));
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.level)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let b: Vec<BigRational> = self
            .coords
            .iter()
            .cloned()
            .map(BigRational::from_integer)
            .collect();
        // u * b + v * phi = g, g a nonzero constant since phi is irreducible
        let (g, u) = rat_ext_gcd(b, phi);
        debug_assert_eq!(g.len(), 1);
        let g0 = &g[0];
        let mut common = BigInt::one();
        for c in &u {
            common = common.lcm(c.denom());
        }
        let scale_num = &common * g0.numer();
        let coords: Vec<BigInt> = u
            .iter()
            .map(|c| c.numer() * (&common / c.denom()) * g0.denom())
            .collect();
        // result = u / g * denom(self)
        let coords = coords.into_iter().map(|c| c * &self.denom).collect();
        Ok(Self::normalized(
            self.level,
            reduce_mod_phi(self.level, coords),
            scale_num,
        ))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Image under `sigma_{M,d}: zeta_M -> zeta_M^d`.
    pub fn galois_apply(&self, d: i64) -> Result<Self> {
        let m = self.level;
        if (d.rem_euclid(m as i64) as u64).gcd(&m) != 1 {
            return Err(Error::NotCoprime { d, level: m });
        }
        let d = modulo(d, m) as usize;
        if d == 1 || self.is_rational() {
            return Ok(self.clone());
        }
        let mut buf = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                buf[(i * d) % m as usize] += c;
            }
        }
        Ok(Self::normalized(
            m,
            reduce_mod_phi(m, buf),
            self.denom.clone(),
        ))
    }

    /// The same field element in the power basis of a level divisible by
    /// `self.level`, using `zeta_M = zeta_T^(T/M)`.
    pub fn embed_level(&self, target: u64) -> Result<Self> {
        if !target.is_multiple_of(self.level) {
            return Err(Error::LevelNotDivisible {
                from: self.level,
                to: target,
            });
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let step = (target / self.level) as usize;
        let mut buf = vec![BigInt::zero(); (self.coords.len() - 1) * step + 1];
        for (i, c) in self.coords.iter().enumerate() {
            buf[i * step] = c.clone();
        }
        Ok(Self::normalized(
            target,
            reduce_mod_phi(target, buf),
            self.denom.clone(),
        ))
    }

    /// Partial inverse of [`embed_level`](Self::embed_level): express the
    /// element at a lower level `m` dividing `self.level`, if it lies in
    /// `Q(zeta_m)`.
    pub fn restrict_level(&self, m: u64) -> Result<Self> {
        if !self.level.is_multiple_of(m) {
            return Err(Error::LevelNotDivisible {
                from: m,
                to: self.level,
            });
        }
        if m == self.level {
            return Ok(self.clone());
        }
        if euler_phi(m) == 1 {
            return if self.is_rational() {
                Ok(Self {
                    level: m,
                    coords: vec![self.coords[0].clone()],
                    denom: self.denom.clone(),
                })
            } else {
                Err(Error::NotInSubfield(m))
            };
        }
        let k = euler_phi(m) as usize;
        let columns: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                CycNumber::zeta_pow(m, i as i64)
                    .embed_level(self.level)
                    .unwrap()
                    .coords
            })
            .collect();
        let sol = solve_overdetermined(&columns, &self.coords).ok_or(Error::NotInSubfield(m))?;
        let mut common = BigInt::one();
        for c in &sol {
            common = common.lcm(c.denom());
        }
        let coords = sol
            .iter()
            .map(|c| c.numer() * (&common / c.denom()))
            .collect();
        Ok(Self::normalized(m, coords, common * &self.denom))
    }

    /// Largest `e` with `a` in `p^e Z_(p)[zeta_M]`, i.e. the minimum `p`-adic
    /// order of the numerator coordinates minus that of the denominator.
    /// `None` for zero.
    pub fn p_adic_order(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        let num = self
            .coords
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| bigint_p_order(c, &p))
            .min()
            .unwrap();
        Some(num as i64 - bigint_p_order(&self.denom, &p) as i64)
    }

    /// Membership in `p Z[zeta_M]`: every coordinate divisible by `p`.
    pub fn is_p_divisible(&self, p: u64) -> Result<bool> {
        if !self.is_integral() {
            return Err(Error::NotIntegral(self.denom.to_string()));
        }
        Ok(self.coords_divisible_by(p))
    }

    /// Membership in `p Z_(p)[zeta_M]`: the denominator is prime to `p` and
    /// every numerator coordinate is divisible by `p`. Agrees with
    /// [`is_p_divisible`](Self::is_p_divisible) on algebraic integers.
    pub fn is_p_locally_divisible(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        !self.denom.is_multiple_of(&pb) && self.coords_divisible_by(p)
    }

    fn coords_divisible_by(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        self.coords.iter().all(|c| c.is_multiple_of(&pb))
    }

    /// Checks `c^p = sigma_{M,p}(c) (mod p Z[zeta_M])` for an integral `c`
    /// and `p` not dividing `M`.
    pub fn frobenius_residue_check(&self, p: u64) -> Result<bool> {
        if self.level.is_multiple_of(p) {
            return Err(Error::PrimeDividesLevel {
                p,
                level: self.level,
            });
        }
        if !self.is_integral() {
            return Err(Error::NotIntegral(self.denom.to_string()));
        }
        let diff = &self.pow(p) - &self.galois_apply(p as i64)?;
        diff.is_p_divisible(p)
    }

    /// Text form without the level suffix.
    pub fn to_bare_string(&self) -> String {
        let num = render_poly(&self.coords);
        if self.denom.is_one() {
            num
        } else if self.is_rational() {
            format!("{}/{}", self.coords[0], self.denom)
        } else {
            format!("({num})/{}", self.denom)
        }
    }

    /// Parse the bare polynomial-in-`z` form at a given level.
    pub fn parse_at_level(text: &str, level: u64) -> Result<Self> {
        let mut p = ExprParser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            level,
        };
        let v = p.sum()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("trailing input in {text:?}")));
        }
        Ok(v)
    }
}

fn bigint_p_order(n: &BigInt, p: &BigInt) -> u64 {
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

fn render_poly(coords: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{i}"),
        };
        if i == 0 {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ level {}", self.to_bare_string(), self.level)
    }
}

impl FromStr for CycNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, level) = s
            .rsplit_once("@ level")
            .ok_or_else(|| Error::Parse(format!("missing '@ level' suffix in {s:?}")))?;
        let level: u64 = level
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad level in {s:?}")))?;
        if level == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        Self::parse_at_level(body.trim(), level)
    }
}

/// Recursive-descent evaluator for expressions in `z` over the integers.
struct ExprParser {
    chars: Vec<char>,
    pos: usize,
    level: u64,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<CycNumber> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -self.product()?
            }
            Some('+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<CycNumber> {
        let mut acc = self.power()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                '/' => {
                    self.pos += 1;
                    acc = acc.try_div(&self.power()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<CycNumber> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self
                .integer()?
                .to_u64()
                .ok_or_else(|| Error::Parse("exponent too large".into()))?;
            let v = base.pow(e);
            return if neg { v.inv() } else { Ok(v) };
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<CycNumber> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(CycNumber::zeta(self.level))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(CycNumber::from_int(self.level, self.integer()?)),
            other => Err(Error::Parse(format!(
                "unexpected {other:?} at position {}",
                self.pos
            ))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!(
                "expected integer at position {start}"
            )));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().unwrap())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:expr) => {
        impl $trait<&CycNumber> for &CycNumber {
            type Output = CycNumber;
            /// Panics on a level mismatch; use the `try_` variants to handle it.
            fn $method(self, rhs: &CycNumber) -> CycNumber {
                assert_eq!(self.level, rhs.level, "cyclotomic level mismatch");
                $inner(self, rhs)
            }
        }
        impl $trait<CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $method(self, rhs: CycNumber) -> CycNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &CycNumber, b: &CycNumber| a.add_sub(b, false));
forward_binop!(Sub, sub, |a: &CycNumber, b: &CycNumber| a.add_sub(b, true));
forward_binop!(Mul, mul, |a: &CycNumber, b: &CycNumber| a.mul_unchecked(b));

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            level: self.level,
            coords: self.coords.iter().map(|c| -c).collect(),
            denom: self.denom.clone(),
        }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

/// Bring two elements to the lcm of their levels.
pub fn common_level(a: &CycNumber, b: &CycNumber) -> (CycNumber, CycNumber) {
    let l = lcm(a.level, b.level);
    (a.embed_level(l).unwrap(), b.embed_level(l).unwrap())
}

// --- rational polynomial helpers for inversion and subfield recognition ---

fn rat_trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = rat_trim(b.to_vec());
    let mut r = rat_trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let d = r.len() - 1;
        let c = &r[d] / &lead;
        for (t, bt) in b.iter().enumerate() {
            r[d - db + t] -= &c * bt;
        }
        q[d - db] = c;
        r.pop();
        r = rat_trim(r);
    }
    (q, r)
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    rat_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

/// Returns `(g, u)` with `u * a = g (mod m)`, `g = gcd(a, m)`.
fn rat_ext_gcd(a: Vec<BigRational>, m: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (rat_trim(m), rat_trim(a));
    let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = rat_divrem(&r0, &r1);
        let s = rat_sub(&s0, &rat_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

/// Solve `sum_i x_i * columns[i] = rhs` exactly, returning `None` when the
/// system is inconsistent. The columns are assumed linearly independent.
fn solve_overdetermined(columns: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = columns.len();
    let rows = rhs.len();
    let mut mat: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = columns
                .iter()
                .map(|c| BigRational::from_integer(c[r].clone()))
                .collect();
            row.push(BigRational::from_integer(rhs[r].clone()));
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let Some(pr) = (pivot_row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(pivot_row, pr);
        let lead = mat[pivot_row][col].clone();
        for x in mat[pivot_row].iter_mut() {
            *x /= &lead;
        }
        for r in 0..rows {
            if r != pivot_row && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                let pivot = mat[pivot_row].clone();
                for (x, y) in mat[r].iter_mut().zip(&pivot).take(k + 1) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if mat[pivot_row..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = mat[r][k].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn cyc(level: u64, v: &[i64]) -> CycNumber {
        CycNumber::new(level, ints(v), BigInt::one()).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len(), 49);
        assert_eq!(p105[7], BigInt::from(-2));
    }

    #[test]
    fn field_examples() {
        let i = CycNumber::zeta(4);
        let one = CycNumber::one(4);
        assert_eq!(&(&one + &i) * &(&one - &i), CycNumber::from_int(4, 2));
        let w = CycNumber::zeta(3);
        let inv = (&CycNumber::one(3) + &w).inv().unwrap();
        assert_eq!(inv, &CycNumber::one(3) + &w.pow(2));
        assert!(CycNumber::zero(5).inv().is_err());
        assert!(CycNumber::one(5).try_add(&CycNumber::one(7)).is_err());
    }

    #[test]
    fn inverse_with_denominators() {
        let a = CycNumber::new(7, ints(&[3, -1, 4, 0, 2]), BigInt::from(5)).unwrap();
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
    }

    #[test]
    fn embedding() {
        let m1 = CycNumber::zeta(2).embed_level(6).unwrap();
        assert_eq!(m1, CycNumber::from_int(6, -1));
        let seven = CycNumber::from_int(1, 7).embed_level(5).unwrap();
        assert_eq!(seven.coords(), &ints(&[7, 0, 0, 0])[..]);
        let w = CycNumber::zeta(3).embed_level(12).unwrap();
        assert_eq!(w, CycNumber::zeta_pow(12, 4));
        assert!(w.pow(3).is_one() && !w.is_one());
        assert_eq!(w.restrict_level(3).unwrap(), CycNumber::zeta(3));
        assert!(CycNumber::zeta(12).restrict_level(3).is_err());
        assert!(CycNumber::zeta(3).embed_level(10).is_err());
    }

    #[test]
    fn galois() {
        assert_eq!(
            CycNumber::zeta(5).galois_apply(2).unwrap(),
            CycNumber::zeta_pow(5, 2)
        );
        let a = &CycNumber::one(12) + &CycNumber::zeta(12);
        let s = a.galois_apply(5).unwrap();
        assert_eq!(s, &CycNumber::one(12) + &CycNumber::zeta_pow(12, 5));
        assert_eq!(s.galois_apply(5).unwrap(), a);
        assert!(a.galois_apply(4).is_err());
    }

    #[test]
    fn divisibility() {
        assert!(cyc(8, &[2, 2]).is_p_divisible(2).unwrap());
        assert!(!cyc(3, &[1, 1]).is_p_divisible(3).unwrap());
        assert!(CycNumber::zero(7).is_p_divisible(5).unwrap());
        let half = CycNumber::from_ratio(3, 1, 2).unwrap();
        assert!(half.is_p_divisible(3).is_err());
        let third = CycNumber::from_ratio(3, 3, 5).unwrap();
        assert!(third.is_p_locally_divisible(3));
        assert_eq!(third.p_adic_order(5), Some(-1));
    }

    #[test]
    fn frobenius_examples() {
        assert!(CycNumber::zeta(5).frobenius_residue_check(2).unwrap());
        let c = &CycNumber::one(3) + &CycNumber::zeta(3);
        let diff = &c.pow(2) - &c.galois_apply(2).unwrap();
        assert_eq!(diff, CycNumber::zeta(3).scale(&BigInt::from(2)));
        assert!(c.frobenius_residue_check(2).unwrap());
        assert!(CycNumber::from_int(1, 7)
            .frobenius_residue_check(5)
            .unwrap());
        assert!(CycNumber::zeta(10).frobenius_residue_check(5).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a: CycNumber = "(1 + 2*z^3)/5 @ level 12".parse().unwrap();
        assert_eq!(a.to_string(), "(1 + 2*z^3)/5 @ level 12");
        let b = CycNumber::new(7, ints(&[-3, 0, 1, -1]), BigInt::from(4)).unwrap();
        assert_eq!(b.to_string().parse::<CycNumber>().unwrap(), b);
        assert_eq!(
            CycNumber::from_ratio(1, -1, 6).unwrap().to_string(),
            "-1/6 @ level 1"
        );
        assert_eq!(CycNumber::zero(4).to_string(), "0 @ level 4");
        assert!("1 + z".parse::<CycNumber>().is_err());
    }
}
