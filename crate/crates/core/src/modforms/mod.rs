//! Built-in q-expansions: `Delta/(2 pi)^12`, Eisenstein series, `j`, eta
//! quotients and the Fricke functions `f_v` of level `N`.
//!
//! Every `prec` argument is an exclusive bound on the exponent of `q`: the
//! returned series is known exactly below `q^prec`.

mod dense;
mod expr;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{lcm, modulo};
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::qseries::QSeries;

use dense::{dense_mul, divisor_sums, euler_product, sparse_unit_pow};
pub use expr::FunctionSpec;

/// Index `v = (a/N, b/N)` of a Fricke function, stored as the smaller of
/// `(a, b)` and `(-a, -b)` modulo `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrickeIndex {
    n: u64,
    a: u64,
    b: u64,
}

impl FrickeIndex {
    pub fn new(n: u64, a: i64, b: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFrickeIndex(format!(
                "level {n} must be at least 2"
            )));
        }
        let (a, b) = (modulo(a, n), modulo(b, n));
        if a == 0 && b == 0 {
            return Err(Error::InvalidFrickeIndex(format!(
                "(0, 0) is not a torsion point of exact level {n}"
            )));
        }
        let neg = ((n - a) % n, (n - b) % n);
        let (a, b) = if neg < (a, b) { neg } else { (a, b) };
        Ok(Self { n, a, b })
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `v * [[p, q], [r, s]]` reduced and canonicalized. The matrix must be
    /// invertible modulo `N`.
    pub fn times_matrix(&self, m: [[i64; 2]; 2]) -> Self {
        let (a, b) = (self.a as i64, self.b as i64);
        let n = self.n as i64;
        let na = (a * m[0][0].rem_euclid(n) + b * m[1][0].rem_euclid(n)) % n;
        let nb = (a * m[0][1].rem_euclid(n) + b * m[1][1].rem_euclid(n)) % n;
        Self::new(self.n, na, nb)
            .expect("matrix invertible mod N maps nonzero vectors to nonzero vectors")
    }

    /// Index of `f_v^sigma_d`, namely `v * diag(1, d)`.
    pub fn galois(&self, d: i64) -> Self {
        self.times_matrix([[1, 0], [0, d]])
    }

    /// All distinct indices of level `N`, in increasing order.
    pub fn all(n: u64) -> Vec<Self> {
        let mut out: Vec<Self> = (0..n as i64)
            .flat_map(|a| (0..n as i64).map(move |b| (a, b)))
            .filter_map(|(a, b)| Self::new(n, a, b).ok())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for FrickeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fricke({},{},{})", self.n, self.a, self.b)
    }
}

/// `prod eta(m tau)^e` over the listed factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    factors: Vec<(u64, i64)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(u64, i64)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidEtaQuotient("empty factor list".into()));
        }
        if factors.iter().any(|&(m, _)| m == 0) {
            return Err(Error::InvalidEtaQuotient(
                "scaling factors must be positive".into(),
            ));
        }
        let weight: i64 = factors.iter().map(|&(_, e)| e).sum();
        if weight != 0 {
            return Err(Error::InvalidEtaQuotient(format!(
                "weight {weight}/2 is not zero"
            )));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    /// Order at infinity in units of `1/24`.
    pub fn order_24ths(&self) -> i64 {
        self.factors.iter().map(|&(m, e)| m as i64 * e).sum()
    }

    pub fn lcm_scale(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &(m, _)| lcm(acc, m))
    }
}

impl fmt::Display for EtaQuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(m, e)| format!("{m}^{e}"))
            .collect();
        write!(f, "eta({})", parts.join(" * "))
    }
}

fn dense_to_series(first: i64, coeffs: &[BigInt], prec: i64) -> QSeries {
    QSeries::from_integers(1, first, coeffs, Some(prec))
}

fn euler_pow(m: usize, e: i64, len: usize) -> Vec<BigInt> {
    sparse_unit_pow(&euler_product(m, len), e, len)
}

/// `q prod (1 - q^n)^24`.
pub fn delta_tilde(prec: i64) -> QSeries {
    assert!(prec >= 1, "precision must be at least 1");
    let len = (prec - 1) as usize;
    dense_to_series(1, &euler_pow(1, 24, len), prec)
}

fn eisenstein_dense(k: u32, len: usize) -> Vec<BigInt> {
    let c: i64 = match k {
        4 => 240,
        6 => -504,
        _ => panic!("weight {k} is not supported"),
    };
    let mut s = divisor_sums(k - 1, len);
    for x in s.iter_mut() {
        *x *= c;
    }
    if len > 0 {
        s[0] = BigInt::from(1);
    }
    s
}

/// `E_k = 1 + c_k sum sigma_{k-1}(n) q^n` for `k` in `{4, 6}`.
pub fn eisenstein(k: u32, prec: i64) -> Result<QSeries> {
    if k != 4 && k != 6 {
        return Err(Error::Unsupported(format!(
            "Eisenstein series of weight {k}"
        )));
    }
    assert!(prec >= 1, "precision must be at least 1");
    Ok(dense_to_series(
        0,
        &eisenstein_dense(k, prec as usize),
        prec,
    ))
}

/// `q^-1 * num * prod (1 - q^n)^-24` below `q^prec`, for a dense weight-12
/// numerator.
fn over_delta(num: &[BigInt], prec: i64) -> QSeries {
    let len = (prec + 1) as usize;
    let inv = euler_pow(1, -24, len);
    dense_to_series(-1, &dense_mul(num, &inv, len), prec)
}

type MemoKey = (&'static str, u64, u64, u64);

fn memo(key: MemoKey, prec: i64, build: impl FnOnce(i64) -> QSeries) -> QSeries {
    static CACHE: OnceLock<Mutex<HashMap<MemoKey, QSeries>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let bound = num_rational::Rational64::from_integer(prec);
    if let Some(s) = cache.lock().unwrap().get(&key) {
        if s.precision().is_some_and(|p| p >= bound) {
            return s.truncate(bound);
        }
    }
    let s = build(prec);
    cache.lock().unwrap().insert(key, s.clone());
    s
}

/// `j = E_4^3 / Delta~`.
pub fn j_expansion(prec: i64) -> QSeries {
    assert!(prec >= 0, "precision must be nonnegative");
    memo(("j", 0, 0, 0), prec, |prec| {
        let len = (prec + 1) as usize;
        let e4 = eisenstein_dense(4, len);
        let cube = dense_mul(&dense_mul(&e4, &e4, len), &e4, len);
        over_delta(&cube, prec)
    })
}

/// `E_4 E_6 / Delta~`, the weight-zero factor of a Fricke function.
fn e4e6_over_delta(prec: i64) -> QSeries {
    memo(("e4e6/delta", 0, 0, 0), prec, |prec| {
        let len = (prec + 1) as usize;
        let prod = dense_mul(&eisenstein_dense(4, len), &eisenstein_dense(6, len), len);
        over_delta(&prod, prec)
    })
}

/// `(2 pi i)^-2 wp(v_1 tau + v_2; [tau, 1])` as a series in `q^(1/N)` over
/// `Q(zeta_N)`, from the Fourier development with `w = zeta_N^b q^(a/N)`.
pub fn weierstrass_p_expansion(v: FrickeIndex, prec: i64) -> QSeries {
    let n = v.level();
    let (a, b) = (v.a() as i64, v.b() as i64);
    let ni = n as i64;
    let bound = prec * ni;
    let width = bound.max(0) as usize;
    // raw[key][e]: coefficient of zeta_N^e q^(key/N), keys in [0, bound)
    let mut raw: Vec<Vec<i64>> = vec![Vec::new(); width];
    let mut add = |key: i64, e: i64, c: i64| {
        let slot = &mut raw[key as usize];
        if slot.is_empty() {
            slot.resize(n as usize, 0);
        }
        slot[e.rem_euclid(ni) as usize] += c;
    };
    if a > 0 {
        let mut m = 1;
        while a * m < bound {
            add(a * m, b * m, m);
            m += 1;
        }
    }
    let mut k = 1;
    while k * ni - a < bound {
        let mut m = 1;
        while m * (k * ni - a) < bound {
            add(m * (k * ni - a), -b * m, m);
            if m * (k * ni + a) < bound {
                add(m * (k * ni + a), b * m, m);
            }
            if m * k * ni < bound {
                add(m * k * ni, 0, -2 * m);
            }
            m += 1;
        }
        k += 1;
    }
    let mut constant = CycNumber::from_ratio(n, 1, 12).unwrap();
    if a == 0 {
        let w = CycNumber::zeta_pow(n, b);
        let one_minus = &CycNumber::one(n) - &w;
        let denom = &one_minus * &one_minus;
        constant = &constant + &w.try_div(&denom).expect("zeta^b != 1 for b != 0");
    }
    let mut terms = Vec::new();
    for (key, coeffs) in raw.into_iter().enumerate() {
        if coeffs.is_empty() {
            continue;
        }
        let c = CycNumber::new(
            n,
            coeffs.into_iter().map(BigInt::from).collect(),
            BigInt::from(1),
        )
        .unwrap();
        terms.push((key as i64, c));
    }
    let mut p = QSeries::new(n, n, terms, Some(bound)).unwrap();
    if prec > 0 {
        p = &p + &QSeries::constant(constant);
    }
    p
}

/// `f_v = 12 (E_4 E_6 / Delta~) P_v`, where `P_v` is the normalized
/// Weierstrass series. Leading term `q^-1`.
pub fn fricke_expansion(v: FrickeIndex, prec: i64) -> QSeries {
    assert!(prec >= 0, "precision must be nonnegative");
    memo(("fricke", v.level(), v.a(), v.b()), prec, |prec| {
        let base = e4e6_over_delta(prec);
        let p = weierstrass_p_expansion(v, prec + 1);
        base.mul_truncated(&p, None).scale_int(12)
    })
}

/// `prod eta(m tau)^e`; the leading exponent is `sum(m e) / 24`.
pub fn eta_quotient_expansion(spec: &EtaQuotientSpec, prec: i64) -> QSeries {
    let shift = num_rational::Rational64::new(spec.order_24ths(), 24);
    let bound = num_rational::Rational64::from_integer(prec) - shift;
    if bound <= num_rational::Rational64::zero() {
        return QSeries::zero_to(1, num_rational::Rational64::from_integer(prec));
    }
    let len = bound.ceil().to_integer() as usize;
    let mut acc = vec![BigInt::zero(); len];
    acc[0] = BigInt::from(1);
    for &(m, e) in spec.factors() {
        if e != 0 {
            acc = dense_mul(&acc, &euler_pow(m as usize, e, len), len);
        }
    }
    let body = QSeries::from_integers(1, 0, &acc, Some(len as i64));
    let lead = QSeries::monomial(CycNumber::one(1), *shift.numer(), *shift.denom() as u64);
    lead.mul_truncated(&body, Some(num_rational::Rational64::from_integer(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn coeff(s: &QSeries, n: i64) -> CycNumber {
        s.coefficient_at(n).unwrap()
    }

    #[test]
    fn delta_and_eisenstein() {
        let d = delta_tilde(5);
        assert_eq!(d.to_string(), "q - 24*q^2 + 252*q^3 - 1472*q^4 + O(q^5)");
        assert_eq!(delta_tilde(2).to_string(), "q + O(q^2)");
        let e4 = eisenstein(4, 3).unwrap();
        let e6 = eisenstein(6, 3).unwrap();
        assert_eq!(e4.to_string(), "1 + 240*q + 2160*q^2 + O(q^3)");
        assert_eq!(e6.to_string(), "1 - 504*q - 16632*q^2 + O(q^3)");
        assert!(eisenstein(8, 3).is_err());
    }

    #[test]
    fn j_prefix() {
        let j = j_expansion(3);
        assert_eq!(
            j.to_string(),
            "q^-1 + 744 + 196884*q + 21493760*q^2 + O(q^3)"
        );
        assert_eq!(
            j_expansion(1).precision(),
            Some(Rational64::from_integer(1))
        );
        assert_eq!(j_expansion(10).truncate(Rational64::from_integer(3)), j);
    }

    #[test]
    fn weierstrass_half_period() {
        let v = FrickeIndex::new(2, 0, 1).unwrap();
        let p = weierstrass_p_expansion(v, 4);
        assert_eq!(coeff(&p, 0), CycNumber::from_ratio(2, -1, 6).unwrap());
        assert!(p.terms().values().all(CycNumber::is_rational));
        let w = FrickeIndex::new(5, 2, 3).unwrap();
        assert_eq!(
            weierstrass_p_expansion(w, 3),
            weierstrass_p_expansion(FrickeIndex::new(5, -2, -3).unwrap(), 3)
        );
    }

    #[test]
    fn fricke_indices() {
        assert_eq!(FrickeIndex::all(2).len(), 3);
        assert_eq!(FrickeIndex::all(3).len(), 4);
        assert!(FrickeIndex::new(4, 4, 0).is_err());
        let v = FrickeIndex::new(2, 0, 1).unwrap();
        assert_eq!(
            v.times_matrix([[0, -1], [1, 0]]),
            FrickeIndex::new(2, 1, 0).unwrap()
        );
        let u = FrickeIndex::new(3, 1, 0).unwrap();
        assert_eq!(
            u.times_matrix([[1, 1], [0, 1]]),
            FrickeIndex::new(3, 1, 1).unwrap()
        );
    }

    #[test]
    fn fricke_leading_terms() {
        for n in 2..=6u64 {
            for v in FrickeIndex::all(n) {
                let f = fricke_expansion(v, 2);
                assert_eq!(
                    f.leading_exponent(),
                    Some(Rational64::from_integer(-1)),
                    "{v}"
                );
                assert!(n % f.exp_denom() == 0);
            }
        }
        let f = fricke_expansion(FrickeIndex::new(2, 1, 0).unwrap(), 2);
        assert_eq!(f.leading_coefficient(), Some(&CycNumber::one(2)));
    }

    #[test]
    fn eta_examples() {
        let spec = EtaQuotientSpec::new(vec![(2, 24), (1, -24)]).unwrap();
        assert_eq!(
            eta_quotient_expansion(&spec, 4).to_string(),
            "q + 24*q^2 + 300*q^3 + O(q^4)"
        );
        let trivial = EtaQuotientSpec::new(vec![(1, 24), (1, -24)]).unwrap();
        assert_eq!(
            eta_quotient_expansion(&trivial, 5).to_string(),
            "1 + O(q^5)"
        );
        assert!(EtaQuotientSpec::new(vec![(1, 24)]).is_err());
        assert!(EtaQuotientSpec::new(vec![]).is_err());
        let frac = EtaQuotientSpec::new(vec![(1, 1), (2, -1)]).unwrap();
        let s = eta_quotient_expansion(&frac, 2);
        assert_eq!(s.leading_exponent(), Some(Rational64::new(-1, 24)));
    }
}
