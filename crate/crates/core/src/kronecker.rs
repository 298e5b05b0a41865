//! The congruence `(f_p^p - f^sigma)(f_p - (f^sigma)^p) = 0 (mod p)` at every
//! cusp, its `diag(p, 1)` translate, and classical modular polynomials.
//!
//! Here `f_p(tau) = f(tau/p)` and `f^sigma` is `f` with `sigma_p` applied to
//! its Fourier coefficients. At a cusp `alpha`, `f_p o alpha` is rewritten
//! through `[1 0; 0 p] alpha = gamma [p 0; 0 1]` (when `p | a`) or
//! `gamma' [1 k; 0 p]` (otherwise). In the second case `f^sigma o alpha`
//! equals `s((tau + k)/p)` with `s(tau) = (f^sigma o alpha T^-k)(p tau)`, so
//! the whole product is formed at level `N` and twisted once at the end.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, sl2_order};
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::jreduce::{char_poly_of, integrality_certificate, IntegralityCertificate, JPolynomial};
use crate::modforms::{j_expansion, FunctionSpec};
use crate::qseries::QSeries;
use crate::transform::{
    case_split, compose_spec, coset_representatives, cusp_expansion_fp_unchecked,
    cusp_expansion_galois_operand, galois_operand_spec, sample_cosets, subject_level, CaseSplit,
    IntegerMatrix2x2,
};

/// Default number of certified coefficients per cusp.
pub const DEFAULT_TARGET: usize = 50;
/// Largest `|SL_2(Z/Np)|` for which every coset is checked.
pub const ALL_COSETS_LIMIT: u64 = 5000;
/// Sample size used when the coset count exceeds the limit.
pub const AUTO_SAMPLE: usize = 64;

/// `(a^p - b)(a - b^p)`.
fn kronecker_product(a: &QSeries, b: &QSeries, p: u64) -> QSeries {
    let left = &a.pow(p) - b;
    let right = a - &b.pow(p);
    &left * &right
}

/// Coefficients known beyond `min(leading exponent, 0)`, counted in units of
/// the series' own exponent lattice.
pub fn certified_count(s: &QSeries) -> i64 {
    match s.prec_key() {
        Some(k) => k - s.low_key().min(0),
        None => i64::MAX,
    }
}

fn check_prime(f: &FunctionSpec, p: u64, negative_control: bool) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = subject_level(f)?;
    if n > 1 && n % p == 0 {
        return Err(Error::PrimeDividesLevel { p, level: n });
    }
    let r = p % n;
    if !negative_control && n > 2 && r != 1 && r != n - 1 {
        return Err(Error::Hypothesis(format!(
            "p = {p} is not congruent to 1 or -1 modulo N = {n}"
        )));
    }
    Ok(n)
}

/// Which pieces a cusp needs: the product is determined by the case and the
/// two functions entering it; `k` only enters through the final twist.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct PieceKey {
    case: u8,
    unscaled: FunctionSpec,
    scaled: FunctionSpec,
}

fn piece_key(f: &FunctionSpec, alpha: &IntegerMatrix2x2, p: u64) -> Result<(PieceKey, CaseSplit)> {
    let split = case_split(alpha, p)?;
    let key = match split {
        CaseSplit::Divisible { gamma } => PieceKey {
            case: 1,
            // (f o gamma)(p tau) and (f^sigma o alpha)(tau)
            scaled: compose_spec(f, &gamma)?,
            unscaled: galois_operand_spec(f, alpha, p)?,
        },
        CaseSplit::Shifted { gamma, k } => PieceKey {
            case: 2,
            // (f o gamma')(tau) and (f^sigma o alpha T^-k)(p tau)
            unscaled: compose_spec(f, &gamma)?,
            scaled: galois_operand_spec(f, &alpha.mul(&IntegerMatrix2x2::new(1, -k, 0, 1)), p)?,
        },
    };
    Ok((key, split))
}

/// The product for a piece key with inputs known below `q^prec`.
fn piece_product(key: &PieceKey, p: u64, prec: i64) -> Result<QSeries> {
    let x = key.unscaled.expand(prec)?;
    let y = key
        .scaled
        .expand(Integer::div_ceil(&prec, &(p as i64)).max(1))?
        .substitute_up(p);
    Ok(match key.case {
        1 => kronecker_product(&y, &x, p),
        _ => kronecker_product(&x, &y, p),
    })
}

fn finish(piece: &QSeries, split: &CaseSplit, p: u64) -> QSeries {
    match split {
        CaseSplit::Divisible { .. } => piece.clone(),
        CaseSplit::Shifted { k, .. } => piece.twist_shift(*k, p),
    }
}

/// Raise the input precision until at least `target` coefficients of the
/// result are certified.
fn piece_with_target(key: &PieceKey, p: u64, target: usize) -> Result<(QSeries, i64)> {
    let probe = match key.case {
        1 => CaseSplit::Divisible {
            gamma: IntegerMatrix2x2::IDENTITY,
        },
        _ => CaseSplit::Shifted {
            gamma: IntegerMatrix2x2::IDENTITY,
            k: 0,
        },
    };
    let mut prec = p as i64 + 2;
    for _ in 0..64 {
        let piece = piece_product(key, p, prec)?;
        let out = finish(&piece, &probe, p);
        let have = certified_count(&out);
        if have >= target as i64 {
            return Ok((piece, prec));
        }
        let per_q = out.exp_denom() as i64;
        prec += Integer::div_ceil(&(target as i64 - have), &per_q).max(1);
    }
    Err(Error::InsufficientPrecision(format!(
        "could not certify {target} coefficients"
    )))
}

/// `(pF) o alpha` with at least `target` certified coefficients.
#[allow(non_snake_case)]
pub fn build_F_expansion(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    target: usize,
) -> Result<QSeries> {
    check_prime(f, p, false)?;
    build_F_expansion_unchecked(f, alpha, p, target)
}

/// `build_F_expansion` without the congruence hypothesis on `p`.
#[allow(non_snake_case)]
pub fn build_F_expansion_unchecked(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    target: usize,
) -> Result<QSeries> {
    check_prime(f, p, true)?;
    let (key, split) = piece_key(f, alpha, p)?;
    let (piece, _) = piece_with_target(&key, p, target)?;
    Ok(finish(&piece, &split, p))
}

/// `(pF) o alpha` assembled directly from the cusp expansions of `f_p` and
/// `f^sigma`, all products taken at level `Np`. Inputs known below `q^prec`.
#[allow(non_snake_case)]
pub fn build_F_expansion_direct(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    prec: i64,
) -> Result<QSeries> {
    let u = cusp_expansion_fp_unchecked(f, alpha, p, prec)?;
    let s = cusp_expansion_galois_operand(f, alpha, p, prec)?;
    Ok(kronecker_product(&u, &s, p))
}

/// `pG(tau) = (f(tau)^p - f^sigma(p tau))(f(tau) - f^sigma(p tau)^p)`, with
/// the inputs known below `q^prec`.
#[allow(non_snake_case)]
pub fn build_G_expansion(f: &FunctionSpec, p: u64, prec: i64) -> Result<QSeries> {
    check_prime(f, p, false)?;
    let fs = f.expand(prec)?;
    let sigma = fs.galois_on_coeffs(p as i64)?;
    let scaled = sigma.substitute_up(p);
    Ok(kronecker_product(&fs, &scaled, p))
}

/// Which cusps to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    CuspInfinity,
    AllCosets,
    Sampled {
        count: usize,
        seed: u64,
    },
    /// All cosets when there are at most `ALL_COSETS_LIMIT`, otherwise the
    /// cusp at infinity plus a seeded sample.
    Auto {
        seed: u64,
    },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CuspInfinity => write!(f, "cusp-infinity"),
            Self::AllCosets => write!(f, "all-cosets"),
            Self::Sampled { count, seed } => write!(f, "sampled({count}, seed={seed})"),
            Self::Auto { seed } => write!(f, "auto(seed={seed})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientFailure {
    pub exponent: String,
    pub coefficient: String,
}

/// Outcome at one cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspResult {
    pub coset: IntegerMatrix2x2,
    pub case: u8,
    pub k: Option<i64>,
    /// Every coefficient in the window lies in `p Z_(p)[zeta]`.
    pub divisible: bool,
    pub first_failure: Option<CoefficientFailure>,
    /// Half-open exponent window `[lo, hi)` in units of `1/(Np)`.
    pub window: [i64; 2],
    pub certified: i64,
    pub leading_exponent: Option<String>,
    /// Least exact power of `p` over the nonzero coefficients.
    pub min_p_power: Option<i64>,
    /// Every coefficient is an algebraic integer.
    pub integral: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub n: u64,
    pub p: u64,
    pub subject: String,
    pub mode: String,
    pub negative_control: bool,
    pub target: usize,
    /// Denominator `Np` of the window units.
    pub precision_units: u64,
    pub cosets_total: u64,
    pub per_cusp: Vec<CuspResult>,
    pub min_p_power: Option<i64>,
    pub all_integral: bool,
    pub verdict: Verdict,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CuspResult> {
        self.per_cusp.iter().filter(|c| !c.divisible)
    }
}

impl fmt::Display for CongruenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "subject {} N={} p={} mode={}{}",
            self.subject,
            self.n,
            self.p,
            self.mode,
            if self.negative_control {
                " (negative control)"
            } else {
                ""
            }
        )?;
        writeln!(
            f,
            "cusps checked: {} of {} cosets; target {} coefficients; windows in 1/{} units",
            self.per_cusp.len(),
            self.cosets_total,
            self.target,
            self.precision_units
        )?;
        for c in &self.per_cusp {
            let status = if c.divisible { "ok" } else { "FAIL" };
            write!(
                f,
                "  {} case {}{} window [{}, {}) certified {} min p-power {} integral {} {}",
                c.coset,
                c.case,
                c.k.map(|k| format!(" k={k}")).unwrap_or_default(),
                c.window[0],
                c.window[1],
                c.certified,
                c.min_p_power.map_or("inf".to_string(), |m| m.to_string()),
                c.integral,
                status
            )?;
            if let Some(fail) = &c.first_failure {
                write!(
                    f,
                    " first failure at q^{}: {}",
                    fail.exponent, fail.coefficient
                )?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "min p-power {}; all integral {}",
            self.min_p_power
                .map_or("inf".to_string(), |m| m.to_string()),
            self.all_integral
        )?;
        write!(
            f,
            "verdict: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn cusp_modulus(n: u64, p: u64) -> u64 {
    n * p
}

fn select_cosets(
    f: &FunctionSpec,
    n: u64,
    p: u64,
    mode: Mode,
) -> Result<(Vec<IntegerMatrix2x2>, u64)> {
    let m = cusp_modulus(n, p);
    let total = sl2_order(m);
    if matches!(f, FunctionSpec::Eta(_)) && mode != Mode::CuspInfinity {
        return Err(Error::Unsupported(
            "eta quotients are checked at the cusp at infinity only".into(),
        ));
    }
    let sampled = |count: usize, seed: u64| {
        let mut out = vec![IntegerMatrix2x2::IDENTITY];
        out.extend(sample_cosets(m, count, seed));
        // make sure both matrix identities are exercised
        if !out.iter().any(|g| g.a.rem_euclid(p as i64) == 0) {
            out.push(IntegerMatrix2x2::S);
        }
        out
    };
    let cosets = match mode {
        Mode::CuspInfinity => vec![IntegerMatrix2x2::IDENTITY],
        Mode::AllCosets if total > ALL_COSETS_LIMIT => {
            return Err(Error::Unsupported(format!(
                "{total} cosets exceed the all-cosets limit of {ALL_COSETS_LIMIT}; use sampled mode"
            )))
        }
        Mode::AllCosets => coset_representatives(m),
        Mode::Sampled { count, seed } => sampled(count, seed),
        Mode::Auto { .. } if total <= ALL_COSETS_LIMIT => coset_representatives(m),
        Mode::Auto { seed } => sampled(AUTO_SAMPLE, seed),
    };
    Ok((cosets, total))
}

fn inspect(series: &QSeries, p: u64) -> (bool, Option<CoefficientFailure>, Option<i64>, bool) {
    let mut first = None;
    let mut min_power: Option<i64> = None;
    let mut integral = true;
    for (e, c) in series.iter() {
        integral &= c.is_integral();
        if let Some(v) = c.p_adic_order(p) {
            min_power = Some(min_power.map_or(v, |m| m.min(v)));
        }
        if first.is_none() && !c.is_p_locally_divisible(p) {
            first = Some(CoefficientFailure {
                exponent: e.to_string(),
                coefficient: c.to_string(),
            });
        }
    }
    (first.is_none(), first, min_power, integral)
}

fn scaled_units(e: Rational64, units: u64) -> i64 {
    (e * Rational64::from_integer(units as i64))
        .floor()
        .to_integer()
}

/// Options beyond the subject, prime and mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub target: usize,
    /// Allow `p` outside `+-1 (mod N)` and report what is observed.
    pub negative_control: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            target: DEFAULT_TARGET,
            negative_control: false,
        }
    }
}

/// Check the congruence at every selected cusp.
pub fn verify_congruence(
    f: &FunctionSpec,
    p: u64,
    mode: Mode,
    opts: VerifyOptions,
) -> Result<CongruenceReport> {
    let n = check_prime(f, p, opts.negative_control)?;
    let (cosets, total) = select_cosets(f, n, p, mode)?;
    let units = cusp_modulus(n, p);
    let mut pieces: HashMap<PieceKey, QSeries> = HashMap::new();
    let mut per_cusp = Vec::with_capacity(cosets.len());
    for alpha in cosets {
        let (key, split) = piece_key(f, &alpha, p)?;
        if !pieces.contains_key(&key) {
            let (piece, _) = piece_with_target(&key, p, opts.target)?;
            pieces.insert(key.clone(), piece);
        }
        let series = finish(&pieces[&key], &split, p);
        let (divisible, first_failure, min_p_power, integral) = inspect(&series, p);
        let lo = series.low().min(Rational64::from_integer(0));
        let hi = series
            .precision()
            .expect("products of truncated series are truncated");
        per_cusp.push(CuspResult {
            coset: alpha,
            case: split.number(),
            k: match split {
                CaseSplit::Shifted { k, .. } => Some(k),
                CaseSplit::Divisible { .. } => None,
            },
            divisible,
            first_failure,
            window: [scaled_units(lo, units), scaled_units(hi, units)],
            certified: certified_count(&series),
            leading_exponent: series.leading_exponent().map(|e| e.to_string()),
            min_p_power,
            integral,
        });
    }
    let min_p_power = per_cusp.iter().filter_map(|c| c.min_p_power).min();
    let all_integral = per_cusp.iter().all(|c| c.integral);
    let verdict = if per_cusp.iter().all(|c| c.divisible) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CongruenceReport {
        n,
        p,
        subject: f.to_string(),
        mode: mode.to_string(),
        negative_control: opts.negative_control,
        target: opts.target,
        precision_units: units,
        cosets_total: total,
        per_cusp,
        min_p_power,
        all_integral,
        verdict,
    })
}

/// `Phi_p(x, y)` as a map from `(i, k)` to the coefficient of `x^i y^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomial {
    p: u64,
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl ModularPolynomial {
    pub fn from_coeffs(p: u64, coeffs: BTreeMap<(u32, u32), BigInt>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { p, coeffs }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), BigInt> {
        &self.coeffs
    }

    pub fn coefficient(&self, i: u32, k: u32) -> BigInt {
        self.coeffs.get(&(i, k)).cloned().unwrap_or_default()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(&(i, k), c)| self.coeffs.get(&(k, i)) == Some(c))
    }

    /// Monic of degree `p + 1` in `x`.
    pub fn is_monic_in_x(&self) -> bool {
        let d = self.p as u32 + 1;
        self.coeffs.keys().all(|&(i, _)| i <= d)
            && self.coefficient(d, 0) == BigInt::from(1)
            && self.coeffs.keys().filter(|&&(i, _)| i == d).count() == 1
    }

    /// `(i, k, coefficient)` in lexicographic order.
    pub fn triples(&self) -> Vec<(u32, u32, BigInt)> {
        self.coeffs
            .iter()
            .map(|(&(i, k), c)| (i, k, c.clone()))
            .collect()
    }

    /// `Phi_p(x, y)` evaluated at two series.
    pub fn evaluate(&self, x: &QSeries, y: &QSeries) -> QSeries {
        let d = self.p as usize + 1;
        let xp: Vec<QSeries> = powers(x, d);
        let yp: Vec<QSeries> = powers(y, d);
        let mut acc = QSeries::zero(crate::arith::lcm(x.level(), y.level()));
        for (&(i, k), c) in &self.coeffs {
            let term =
                (&xp[i as usize] * &yp[k as usize]).scale(&CycNumber::from_bigint(1, c.clone()));
            acc = &acc + &term;
        }
        acc
    }
}

fn powers(s: &QSeries, d: usize) -> Vec<QSeries> {
    let mut out = vec![QSeries::one(s.level())];
    for i in 1..=d {
        let next = &out[i - 1] * s;
        out.push(next);
    }
    out
}

impl fmt::Display for ModularPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |v: &str, e: u32| match e {
            0 => None,
            1 => Some(v.to_string()),
            _ => Some(format!("{v}^{e}")),
        };
        let mut out = String::new();
        for (&(i, k), c) in self.coeffs.iter().rev() {
            let vars: Vec<String> = [mono("x", i), mono("y", k)].into_iter().flatten().collect();
            let abs = c.abs();
            let body = if vars.is_empty() {
                abs.to_string()
            } else if abs == BigInt::from(1) {
                vars.join("*")
            } else {
                format!("{abs}*{}", vars.join("*"))
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

/// The `p + 1` conjugates `j(p tau)` and `j((tau + k)/p)` known below `q^prec`.
pub fn hecke_conjugates(p: u64, prec: i64) -> Vec<QSeries> {
    let bound = Rational64::from_integer(prec);
    let pi = p as i64;
    let mut out = vec![j_expansion(Integer::div_ceil(&prec, &pi))
        .substitute_up(p)
        .truncate(bound)];
    let j = j_expansion(prec * pi);
    for k in 0..pi {
        out.push(j.twist_shift(k, p).truncate(bound));
    }
    out
}

/// The conjugates together with their characteristic polynomial over `Q[j]`,
/// highest power first.
fn hecke_char_poly(p: u64, window: i64) -> Result<(Vec<QSeries>, Vec<JPolynomial>)> {
    let d = p as i64 + 1;
    let mut prec = window.max(2 * d + 1);
    let limit = prec + 16 * d;
    loop {
        // the product of all conjugates loses about p + 1 from each window
        let members = hecke_conjugates(p, prec + d);
        match char_poly_of(&members) {
            Ok(polys) => return Ok((members, polys)),
            Err(Error::InsufficientPrecision(_)) if prec < limit => prec += d,
            Err(e) => return Err(e),
        }
    }
}

/// Integrality certificate for the orbit of `j(p tau)`; its characteristic
/// polynomial is `Phi_p(x, j)`.
pub fn hecke_certificate(p: u64, window: i64) -> Result<IntegralityCertificate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let (members, _) = hecke_char_poly(p, window)?;
    integrality_certificate(&format!("j({p}*tau)"), &members)
}

/// `Phi_p` from `prod (x - r)` over the conjugates, each coefficient reduced
/// to a polynomial in `j`. Supported for `p` in `{2, 3, 5}`. The conjugates
/// are expanded below `q^window`, widened when the reduction runs short.
pub fn modular_polynomial(p: u64, window: i64) -> Result<ModularPolynomial> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > 5 {
        return Err(Error::Unsupported(format!(
            "modular polynomial for p = {p}"
        )));
    }
    let (_, polys) = hecke_char_poly(p, window)?;
    let mut coeffs = BTreeMap::new();
    let top = polys.len() - 1;
    for (idx, poly) in polys.iter().enumerate() {
        let i = (top - idx) as u32;
        for (k, c) in poly.coeffs().iter().enumerate() {
            let c = c
                .as_integer()
                .ok_or_else(|| Error::ZetaNotCancelled(format!("non-integer coefficient {c}")))?;
            coeffs.insert((i, k as u32), c.clone());
        }
    }
    let phi = ModularPolynomial::from_coeffs(p, coeffs);
    if !phi.is_symmetric() || !phi.is_monic_in_x() {
        return Err(Error::ZetaNotCancelled(
            "assembled polynomial is not symmetric and monic".into(),
        ));
    }
    Ok(phi)
}

/// `Phi_p(x, y) = (x^p - y)(x - y^p) (mod p)` coefficient-wise.
pub fn kronecker_classical_check(phi: &ModularPolynomial) -> bool {
    let p = phi.p() as u32;
    let mut diff = phi.coeffs().clone();
    for ((i, k), c) in [((p + 1, 0), 1), ((p, p), -1), ((1, 1), -1), ((0, p + 1), 1)] {
        *diff.entry((i, k)).or_default() -= BigInt::from(c);
    }
    let pb = BigInt::from(phi.p());
    diff.values().all(|c| c.is_multiple_of(&pb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::FrickeIndex;

    fn fr(n: u64, a: i64, b: i64) -> FunctionSpec {
        FunctionSpec::Fricke(FrickeIndex::new(n, a, b).unwrap())
    }

    #[test]
    fn phi_two() {
        let phi = modular_polynomial(2, 60).unwrap();
        assert_eq!(phi.coefficient(3, 0), BigInt::from(1));
        assert_eq!(phi.coefficient(2, 0), BigInt::from(-162000));
        assert_eq!(
            phi.coefficient(0, 0),
            "-157464000000000".parse::<BigInt>().unwrap()
        );
        assert_eq!(phi.coefficient(1, 1), BigInt::from(40773375));
        assert!(kronecker_classical_check(&phi));
        assert!(phi.is_symmetric());
        assert_eq!(phi.coeffs().len(), 11);
        let y = j_expansion(40);
        let x = j_expansion(20).substitute_up(2);
        let value = phi.evaluate(&x, &y);
        assert!(value.is_zero() && value.precision().unwrap() > Rational64::from_integer(30));
    }

    #[test]
    fn phi_three_and_five() {
        for p in [3, 5] {
            let phi = modular_polynomial(p, 0).unwrap();
            assert!(phi.is_symmetric() && phi.is_monic_in_x());
            assert!(kronecker_classical_check(&phi));
        }
        let phi3 = modular_polynomial(3, 0).unwrap();
        assert_eq!(phi3.coefficient(3, 3), BigInt::from(-1));
        assert_eq!(phi3.coefficient(2, 2), BigInt::from(2587918086u64));
        assert_eq!(phi3.coefficient(3, 2), BigInt::from(2232));
        assert!(modular_polynomial(7, 0).is_err());
    }

    #[test]
    fn classical_check_on_the_reduction_itself() {
        let coeffs = BTreeMap::from([
            ((3, 0), BigInt::from(1)),
            ((2, 2), BigInt::from(-1)),
            ((1, 1), BigInt::from(-1)),
            ((0, 3), BigInt::from(1)),
        ]);
        assert!(kronecker_classical_check(&ModularPolynomial::from_coeffs(
            2,
            coeffs.clone()
        )));
        let mut off = coeffs;
        off.insert((1, 0), BigInt::from(1));
        assert!(!kronecker_classical_check(&ModularPolynomial::from_coeffs(
            2, off
        )));
    }

    #[test]
    fn fast_and_direct_routes_agree() {
        for (f, p) in [
            (FunctionSpec::J, 2u64),
            (fr(2, 0, 1), 3),
            (fr(3, 1, 0), 2),
            (fr(3, 1, 1), 5),
        ] {
            let n = subject_level(&f).unwrap();
            let reps = coset_representatives(n * p);
            let step = reps.len() / 12 + 1;
            for alpha in reps.into_iter().step_by(step) {
                let fast = build_F_expansion(&f, &alpha, p, 12).unwrap();
                let direct = build_F_expansion_direct(&f, &alpha, p, 3 * p as i64 + 4).unwrap();
                let bound = fast.precision().unwrap().min(direct.precision().unwrap());
                let (fast, direct) = (fast.truncate(bound), direct.truncate(bound));
                assert!(fast.terms().len() >= 8, "{f} {alpha}");
                assert_eq!(fast, direct, "{f} {alpha} p={p}");
            }
        }
    }

    #[test]
    fn j_at_two_is_even() {
        let pf = build_F_expansion(&FunctionSpec::J, &IntegerMatrix2x2::IDENTITY, 2, 20).unwrap();
        assert!(certified_count(&pf) >= 20);
        assert!(pf.terms().values().all(|c| c.is_p_divisible(2).unwrap()));
        let g = build_G_expansion(&FunctionSpec::J, 2, 12).unwrap();
        assert!(g.terms().values().all(|c| c.is_p_divisible(2).unwrap()));
        let bound = g
            .precision()
            .unwrap()
            .min(pf.substitute_up(2).precision().unwrap());
        assert_eq!(g.truncate(bound), pf.substitute_up(2).truncate(bound));
    }

    #[test]
    fn small_reports_pass() {
        let opts = VerifyOptions {
            target: 20,
            negative_control: false,
        };
        let r = verify_congruence(&FunctionSpec::J, 2, Mode::AllCosets, opts).unwrap();
        assert_eq!(r.per_cusp.len(), 6);
        assert!(r.passed(), "{r}");
        assert!(r.min_p_power.unwrap() >= 1);
        let r = verify_congruence(&fr(2, 0, 1), 3, Mode::CuspInfinity, opts).unwrap();
        assert!(r.passed(), "{r}");
        assert!(verify_congruence(&fr(5, 0, 1), 3, Mode::CuspInfinity, opts).is_err());
    }
}
