//! Reduction of level-one weakly holomorphic series to polynomials in `j`,
//! and characteristic polynomials `prod (x - g o alpha_i)` over `Z[j]`.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::modforms::{fricke_expansion, j_expansion, FrickeIndex};
use crate::qseries::QSeries;

/// `sum c_k j^k`, with `coeffs[k] = c_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JPolynomial {
    level: u64,
    coeffs: Vec<CycNumber>,
}

impl JPolynomial {
    pub fn new(level: u64, mut coeffs: Vec<CycNumber>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| c.level() != level) {
            return Err(Error::LevelMismatch(level, c.level()));
        }
        while coeffs.last().is_some_and(CycNumber::is_zero) {
            coeffs.pop();
        }
        Ok(Self { level, coeffs })
    }

    pub fn constant(c: CycNumber) -> Self {
        let level = c.level();
        Self::new(level, vec![c]).unwrap()
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(
            1,
            coeffs.iter().map(|&c| CycNumber::from_int(1, c)).collect(),
        )
        .unwrap()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[CycNumber] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `j`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(CycNumber::is_integral)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Coefficients at a lower level, when they lie in that subfield.
    pub fn restrict_level(&self, level: u64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.restrict_level(level))
            .collect::<Result<_>>()?;
        Self::new(level, coeffs)
    }

    /// Substitute the `j`-series, giving a series known below `q^prec`.
    pub fn to_series(&self, prec: i64) -> QSeries {
        let bound = Rational64::from_integer(prec);
        let mut acc = QSeries::zero_to(self.level, bound);
        let powers = j_powers(self.coeffs.len().saturating_sub(1), prec);
        for (c, jk) in self.coeffs.iter().zip(&powers) {
            if !c.is_zero() {
                acc = &acc + &jk.scale(c);
            }
        }
        acc
    }
}

impl fmt::Display for JPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "j".to_string(),
                _ => format!("j^{k}"),
            };
            let (neg, body) = match c.as_integer() {
                Some(n) => {
                    let abs = num_traits::Signed::abs(n);
                    let body = if mono.is_empty() {
                        abs.to_string()
                    } else if abs.is_one() {
                        mono
                    } else {
                        format!("{abs}*{mono}")
                    };
                    (num_traits::Signed::is_negative(n), body)
                }
                None if mono.is_empty() => (false, format!("({})", c.to_bare_string())),
                None => (false, format!("({})*{mono}", c.to_bare_string())),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        if self.level > 1 {
            write!(f, "{out} @ level {}", self.level)
        } else {
            write!(f, "{out}")
        }
    }
}

/// `[1, j, j^2, ..., j^m]`, each known below `q^prec`.
fn j_powers(m: usize, prec: i64) -> Vec<QSeries> {
    // each multiplication by j (pole order 1) costs one unit of precision
    let top = prec + m as i64;
    let j = j_expansion(top);
    let mut out = vec![QSeries::one(1).truncate(Rational64::from_integer(top))];
    for k in 1..=m {
        let next = out[k - 1].mul_truncated(&j, Some(Rational64::from_integer(top - k as i64)));
        out.push(next);
    }
    let bound = Rational64::from_integer(prec);
    out.iter().map(|s| s.truncate(bound)).collect()
}

/// Greedy elimination of the principal part: returns `P` and `f - P(j)`.
/// The window must reach at least `q^(m+1)` for pole order `m`, and the
/// remainder must have no terms at exponents `<= 0`.
pub fn reduce_to_j_polynomial(f: &QSeries) -> Result<(JPolynomial, QSeries)> {
    if f.exp_denom() != 1 {
        return Err(Error::FractionalExponents(f.exp_denom()));
    }
    let m = (-f.low_key()).max(0);
    let Some(prec) = f.prec_key() else {
        // an exact Laurent polynomial: any window past its last term works
        let last = f.terms().keys().next_back().copied().unwrap_or(0);
        let bound = (m + 1).max(last + 1).max(1);
        return reduce_to_j_polynomial(&f.truncate(Rational64::from_integer(bound)));
    };
    if prec < m + 1 {
        return Err(Error::InsufficientPrecision(format!(
            "pole order {m} needs the window to reach q^{}, have q^{prec}",
            m + 1
        )));
    }
    let level = f.level();
    let powers = j_powers(m as usize, prec);
    let mut rem = f.clone();
    let mut coeffs = vec![CycNumber::zero(level); m as usize + 1];
    for k in (0..=m).rev() {
        let c = rem.coefficient_at(-k)?;
        if c.is_zero() {
            continue;
        }
        rem = &rem - &powers[k as usize].scale(&c);
        coeffs[k as usize] = c;
    }
    if let Some((e, _)) = rem
        .iter()
        .next()
        .filter(|(e, _)| *e <= Rational64::from_integer(0))
    {
        return Err(Error::NonzeroRemainder(format!(
            "term at q^{e} survived elimination"
        )));
    }
    Ok((JPolynomial::new(level, coeffs)?, rem))
}

/// Reduce a series that must equal a polynomial in `j` on its window, with
/// rational coefficients and integral exponents.
fn reduce_invariant(f: &QSeries) -> Result<JPolynomial> {
    if f.exp_denom() != 1 {
        return Err(Error::ZetaNotCancelled(format!(
            "fractional exponents q^(n/{}) remain",
            f.exp_denom()
        )));
    }
    let f = f
        .restrict_level(1)
        .map_err(|_| Error::ZetaNotCancelled("coefficients are not rational".into()))?;
    let (poly, rem) = reduce_to_j_polynomial(&f)?;
    if let Some((e, c)) = rem.iter().next() {
        return Err(Error::NonzeroRemainder(format!(
            "coefficient {} at q^{e}",
            c.to_bare_string()
        )));
    }
    Ok(poly)
}

/// Orbit of `v` under `SL_2(Z/N)`, generated by `S` and `T`.
pub fn fricke_orbit(v: FrickeIndex) -> Vec<FrickeIndex> {
    let mut seen = BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for m in [[[0, -1], [1, 0]], [[1, 1], [0, 1]]] {
            let w = u.times_matrix(m);
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.into_iter().collect()
}

/// Coefficients of `prod (x - g_i)`, highest power first, as series.
pub fn characteristic_series(members: &[QSeries]) -> Vec<QSeries> {
    let level = members
        .iter()
        .map(QSeries::level)
        .fold(1, crate::arith::lcm);
    let mut poly = vec![QSeries::one(level)];
    for g in members {
        let mut next = poly.clone();
        next.push(QSeries::zero(level));
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = &next[k + 1] - &c.mul_truncated(g, None);
        }
        poly = next;
    }
    // conjugate exponents only cancel below a whole-number bound
    poly.into_iter()
        .map(|c| match c.precision() {
            Some(b) => c.truncate(Rational64::from_integer(b.floor().to_integer())),
            None => c,
        })
        .collect()
}

/// Certificate that `prod (x - g o alpha_i)` lies in `Z[j][x]`, or the first
/// coefficient contradicting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityCertificate {
    pub subject: String,
    /// Highest power first; entry `i` is the coefficient of `x^(t-i)`.
    pub char_poly: Vec<String>,
    pub monic: bool,
    pub all_integral: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Orbit member whose expansion holds the coefficient; `None` when the
    /// offending coefficient belongs to the characteristic polynomial.
    pub coset: Option<usize>,
    pub exponent: String,
    pub coefficient: String,
}

/// Reduce every coefficient of `prod (x - g_i)` to a polynomial in `j`.
pub fn char_poly_of(members: &[QSeries]) -> Result<Vec<JPolynomial>> {
    characteristic_series(members)
        .iter()
        .map(reduce_invariant)
        .collect()
}

impl fmt::Display for IntegralityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "orbit of {} ({} members)",
            self.subject,
            self.char_poly.len().saturating_sub(1)
        )?;
        let t = self.char_poly.len().saturating_sub(1);
        for (i, c) in self.char_poly.iter().enumerate() {
            writeln!(f, "  x^{}: {c}", t - i)?;
        }
        write!(
            f,
            "monic {}; integral over Z[j] {}",
            self.monic, self.all_integral
        )?;
        if let Some(w) = &self.witness {
            let member = w
                .coset
                .map(|c| format!(" in member {c}"))
                .unwrap_or_default();
            write!(f, "\nwitness{member} at {}: {}", w.exponent, w.coefficient)?;
        }
        Ok(())
    }
}

pub fn integrality_certificate(
    subject: &str,
    members: &[QSeries],
) -> Result<IntegralityCertificate> {
    let polys = char_poly_of(members)?;
    let monic = polys.first().is_some_and(JPolynomial::is_one);
    let all_integral = polys.iter().all(JPolynomial::is_integral);
    let mut witness = None;
    if !all_integral {
        witness = members.iter().enumerate().find_map(|(i, g)| {
            g.find_coefficient(|c| !c.is_integral())
                .map(|(e, c)| Witness {
                    coset: Some(i),
                    exponent: e.to_string(),
                    coefficient: c.to_string(),
                })
        });
        if witness.is_none() {
            let t = polys.len() - 1;
            witness = polys.iter().enumerate().find_map(|(i, p)| {
                p.coeffs()
                    .iter()
                    .enumerate()
                    .find(|(_, c)| !c.is_integral())
                    .map(|(k, c)| Witness {
                        coset: None,
                        exponent: format!("x^{} j^{k}", t - i),
                        coefficient: c.to_string(),
                    })
            });
        }
    }
    Ok(IntegralityCertificate {
        subject: subject.to_string(),
        char_poly: polys.iter().map(ToString::to_string).collect(),
        monic,
        all_integral,
        witness,
    })
}

/// Input precision sufficient to reduce the characteristic polynomial of an
/// orbit of `t` functions with simple poles.
pub fn orbit_precision(t: usize) -> i64 {
    2 * t as i64 + 1
}

/// `prod_{v' in orbit(v)} (x - f_v')` with coefficients in `Z[j]` (or
/// `Q[j]` when the Fricke function is not integral).
pub fn orbit_char_poly(v: FrickeIndex, prec: i64) -> Result<Vec<JPolynomial>> {
    let members: Vec<QSeries> = fricke_orbit(v)
        .into_iter()
        .map(|u| fricke_expansion(u, prec))
        .collect();
    char_poly_of(&members)
}

pub fn fricke_certificate(v: FrickeIndex) -> Result<IntegralityCertificate> {
    let orbit = fricke_orbit(v);
    let prec = orbit_precision(orbit.len());
    let members: Vec<QSeries> = orbit.iter().map(|&u| fricke_expansion(u, prec)).collect();
    integrality_certificate(&v.to_string(), &members)
}
