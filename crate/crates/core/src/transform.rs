//! `SL_2(Z)` acting on Fricke indices, coset representatives for `Gamma(M)`,
//! and cusp expansions of `f(tau/p)` and of the Galois conjugate `f^sigma_p`.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{inverse_mod, modulo, sl2_order};
use crate::error::{Error, Result};
use crate::modforms::{fricke_expansion, FrickeIndex, FunctionSpec};
use crate::qseries::QSeries;

/// `[[a, b], [c, d]]` acting by `tau -> (a tau + b) / (c tau + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix2x2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix2x2 {
    pub const IDENTITY: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    pub const S: Self = Self {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };
    pub const T: Self = Self {
        a: 1,
        b: 1,
        c: 0,
        d: 1,
    };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_unimodular(&self) -> bool {
        self.det() == 1
    }

    pub fn require_unimodular(&self) -> Result<()> {
        if self.is_unimodular() {
            Ok(())
        } else {
            Err(Error::NotUnimodular(self.to_string()))
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduce(&self, m: u64) -> Self {
        Self::new(
            modulo(self.a, m) as i64,
            modulo(self.b, m) as i64,
            modulo(self.c, m) as i64,
            modulo(self.d, m) as i64,
        )
    }

    pub fn congruent(&self, o: &Self, m: u64) -> bool {
        self.reduce(m) == o.reduce(m)
    }

    /// Apply to a point given as a rational number.
    pub fn apply(&self, t: Rational64) -> Option<Rational64> {
        let den = Rational64::from_integer(self.c) * t + Rational64::from_integer(self.d);
        if den == Rational64::from_integer(0) {
            return None;
        }
        Some((Rational64::from_integer(self.a) * t + Rational64::from_integer(self.b)) / den)
    }
}

impl fmt::Display for IntegerMatrix2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

/// `f_v o alpha = f_(v alpha)`.
pub fn fricke_sl2_action(v: FrickeIndex, alpha: &IntegerMatrix2x2) -> Result<FrickeIndex> {
    alpha.require_unimodular()?;
    Ok(v.times_matrix(alpha.rows()))
}

/// A matrix in `SL_2(Z)` congruent to `(a, b; c, d)` modulo `m`, which must
/// have determinant 1 modulo `m`.
pub fn lift_to_sl2(a: i64, b: i64, c: i64, d: i64, m: u64) -> IntegerMatrix2x2 {
    if m == 1 {
        return IntegerMatrix2x2::IDENTITY;
    }
    let mi = m as i64;
    let (a, b, c, d) = (
        a.rem_euclid(mi),
        b.rem_euclid(mi),
        c.rem_euclid(mi),
        d.rem_euclid(mi),
    );
    assert_eq!((a * d - b * c).rem_euclid(mi), 1, "not in SL2(Z/{m})");
    let c1 = if c == 0 { mi } else { c };
    let mut d1 = d;
    while c1.gcd(&d1) != 1 {
        d1 += mi;
    }
    // x d1 - y c1 = 1
    let e = d1.extended_gcd(&c1);
    let (x, y) = (e.x, -e.y);
    for s in 0..mi {
        let a1 = x + s * c1;
        let b1 = y + s * d1;
        if (a1 - a).rem_euclid(mi) == 0 && (b1 - b).rem_euclid(mi) == 0 {
            let g = IntegerMatrix2x2::new(a1, b1, c1, d1);
            debug_assert!(g.is_unimodular());
            return g;
        }
    }
    unreachable!("a row completing (c, d) exists modulo {m}")
}

/// Lifts of all of `SL_2(Z/mZ)`, one per right coset of `Gamma(m)`, with the
/// identity first.
pub fn coset_representatives(m: u64) -> Vec<IntegerMatrix2x2> {
    let mut out = vec![IntegerMatrix2x2::IDENTITY];
    if m == 1 {
        return out;
    }
    let mi = m as i64;
    for a in 0..mi {
        for b in 0..mi {
            for c in 0..mi {
                for d in 0..mi {
                    if (a * d - b * c).rem_euclid(mi) != 1 {
                        continue;
                    }
                    if (a, b, c, d) == (1 % mi, 0, 0, 1 % mi) {
                        continue;
                    }
                    out.push(lift_to_sl2(a, b, c, d, m));
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u64, sl2_order(m));
    out
}

/// `count` pseudo-random elements of `SL_2(Z/mZ)` lifted to `SL_2(Z)`.
pub fn sample_cosets(m: u64, count: usize, seed: u64) -> Vec<IntegerMatrix2x2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mi = m as i64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b, c, d) = (
            rng.gen_range(0..mi),
            rng.gen_range(0..mi),
            rng.gen_range(0..mi),
            rng.gen_range(0..mi),
        );
        if (a * d - b * c).rem_euclid(mi) == 1 % mi {
            out.push(lift_to_sl2(a, b, c, d, m));
        }
    }
    out
}

/// Level `N` of a weight-zero subject (1 for `j`).
pub fn subject_level(f: &FunctionSpec) -> Result<u64> {
    match f {
        FunctionSpec::J => Ok(1),
        FunctionSpec::Fricke(v) => Ok(v.level()),
        FunctionSpec::Eta(s) => Ok(s.lcm_scale()),
        other => Err(Error::Unsupported(format!(
            "{other} is not a modular function"
        ))),
    }
}

/// Expansion of `f o alpha` below `q^prec`.
pub fn expand_at(f: &FunctionSpec, alpha: &IntegerMatrix2x2, prec: i64) -> Result<QSeries> {
    alpha.require_unimodular()?;
    match f {
        FunctionSpec::J => f.expand(prec),
        FunctionSpec::Fricke(v) => Ok(fricke_expansion(fricke_sl2_action(*v, alpha)?, prec)),
        FunctionSpec::Eta(_) => {
            let id = IntegerMatrix2x2::IDENTITY;
            let neg = IntegerMatrix2x2::new(-1, 0, 0, -1);
            if *alpha == id || *alpha == neg {
                f.expand(prec)
            } else {
                Err(Error::Unsupported(
                    "eta quotients are only expanded at the cusp at infinity".into(),
                ))
            }
        }
        other => Err(Error::Unsupported(format!(
            "{other} is not a modular function"
        ))),
    }
}

/// The function `f o alpha` as a named function.
pub fn compose_spec(f: &FunctionSpec, alpha: &IntegerMatrix2x2) -> Result<FunctionSpec> {
    alpha.require_unimodular()?;
    match f {
        FunctionSpec::J => Ok(FunctionSpec::J),
        FunctionSpec::Fricke(v) => Ok(FunctionSpec::Fricke(fricke_sl2_action(*v, alpha)?)),
        FunctionSpec::Eta(_) if alpha.b == 0 && alpha.c == 0 => Ok(f.clone()),
        FunctionSpec::Eta(_) => Err(Error::Unsupported(
            "eta quotients are only expanded at the cusp at infinity".into(),
        )),
        other => Err(Error::Unsupported(format!(
            "{other} is not a modular function"
        ))),
    }
}

/// The function `(f^sigma_p) o alpha` as a named function.
pub fn galois_operand_spec(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
) -> Result<FunctionSpec> {
    match f {
        FunctionSpec::Fricke(v) => {
            if v.level() % p == 0 {
                return Err(Error::PrimeDividesLevel {
                    p,
                    level: v.level(),
                });
            }
            Ok(FunctionSpec::Fricke(galois_operand_index(*v, alpha, p)?))
        }
        // rational coefficients: sigma_p acts trivially
        _ => compose_spec(f, alpha),
    }
}

/// Which matrix identity expresses `f(tau/p) o alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseSplit {
    /// `p | a`: `(f o gamma)(p tau)` with `gamma = [a/p, b; c, pd]`.
    Divisible { gamma: IntegerMatrix2x2 },
    /// `p` does not divide `a`: `(f o gamma')((tau + k)/p)` with
    /// `gamma' = [a, (b - ak)/p; pc, d - ck]`.
    Shifted { gamma: IntegerMatrix2x2, k: i64 },
}

impl CaseSplit {
    pub fn number(&self) -> u8 {
        match self {
            Self::Divisible { .. } => 1,
            Self::Shifted { .. } => 2,
        }
    }

    pub fn gamma(&self) -> IntegerMatrix2x2 {
        match self {
            Self::Divisible { gamma } | Self::Shifted { gamma, .. } => *gamma,
        }
    }
}

/// Decompose `[1 0; 0 p] alpha` as in the two cases. `k` is the least
/// nonnegative solution of `a k = b (mod p)`.
pub fn case_split(alpha: &IntegerMatrix2x2, p: u64) -> Result<CaseSplit> {
    alpha.require_unimodular()?;
    let pi = p as i64;
    let IntegerMatrix2x2 { a, b, c, d } = *alpha;
    let split = if a.rem_euclid(pi) == 0 {
        CaseSplit::Divisible {
            gamma: IntegerMatrix2x2::new(a / pi, b, c, pi * d),
        }
    } else {
        let k = (b.rem_euclid(pi)
            * inverse_mod(a, p).expect("p prime and p does not divide a") as i64)
            .rem_euclid(pi);
        CaseSplit::Shifted {
            gamma: IntegerMatrix2x2::new(a, (b - a * k) / pi, pi * c, d - c * k),
            k,
        }
    };
    assert!(
        split.gamma().is_unimodular(),
        "decomposition must stay in SL2(Z)"
    );
    Ok(split)
}

fn check_hypothesis(level: u64, p: u64) -> Result<()> {
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r = p % level.max(1);
    if level > 2 && r != 1 && r != level - 1 {
        return Err(Error::Hypothesis(format!(
            "p = {p} is not congruent to 1 or -1 modulo N = {level}"
        )));
    }
    Ok(())
}

/// Expansion of `f(tau/p) o alpha` below `q^prec`, requiring `p = +-1 (mod N)`.
pub fn cusp_expansion_fp(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    prec: i64,
) -> Result<QSeries> {
    check_hypothesis(subject_level(f)?, p)?;
    cusp_expansion_fp_unchecked(f, alpha, p, prec)
}

/// As `cusp_expansion_fp` without the congruence condition on `p`. The
/// matrix identities hold for every prime; only the congruence needs it.
pub fn cusp_expansion_fp_unchecked(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    prec: i64,
) -> Result<QSeries> {
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let bound = Rational64::from_integer(prec);
    Ok(match case_split(alpha, p)? {
        CaseSplit::Divisible { gamma } => {
            let inner = Integer::div_ceil(&prec, &(p as i64));
            expand_at(f, &gamma, inner)?
                .substitute_up(p)
                .truncate(bound)
        }
        CaseSplit::Shifted { gamma, k } => expand_at(f, &gamma, prec * p as i64)?
            .twist_shift(k, p)
            .truncate(bound),
    })
}

/// `[a, b/p; cp, d] mod N`: conjugation of `alpha` by `diag(1, p)`, so that
/// `diag(1, p) alpha = alpha' diag(1, p)` modulo `N`.
pub fn conjugate_by_galois(alpha: &IntegerMatrix2x2, p: u64, n: u64) -> Result<IntegerMatrix2x2> {
    let pinv = inverse_mod(p as i64, n).ok_or(Error::PrimeDividesLevel { p, level: n })? as i64;
    let ni = n as i64;
    let b = (alpha.b.rem_euclid(ni) * pinv) % ni;
    let c = (alpha.c.rem_euclid(ni) * (p as i64 % ni)) % ni;
    Ok(lift_to_sl2(alpha.a, b, c, alpha.d, n))
}

/// Expansion of `(f^sigma_p) o alpha`: expand `f o alpha'` with the
/// conjugated matrix, then apply `sigma_p` to the coefficients.
pub fn cusp_expansion_galois_operand(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    prec: i64,
) -> Result<QSeries> {
    alpha.require_unimodular()?;
    let n = subject_level(f)?;
    if n > 1 && n % p == 0 {
        return Err(Error::PrimeDividesLevel { p, level: n });
    }
    match f {
        FunctionSpec::Fricke(_) => {
            let conj = conjugate_by_galois(alpha, p, n)?;
            expand_at(f, &conj, prec)?.galois_on_coeffs(p as i64)
        }
        _ => expand_at(f, alpha, prec)?.galois_on_coeffs(p as i64),
    }
}

/// The other operand order: `sigma_p` applied after expanding `f o alpha`.
/// This is `(f o alpha)^sigma_p`, which differs from `(f^sigma_p) o alpha`
/// when the two actions do not commute; kept to exhibit that difference.
pub fn cusp_expansion_galois_after(
    f: &FunctionSpec,
    alpha: &IntegerMatrix2x2,
    p: u64,
    prec: i64,
) -> Result<QSeries> {
    expand_at(f, alpha, prec)?.galois_on_coeffs(p as i64)
}

/// Index of `(f_v^sigma_p) o alpha` computed directly as `v diag(1,p) alpha`.
pub fn galois_operand_index(
    v: FrickeIndex,
    alpha: &IntegerMatrix2x2,
    p: u64,
) -> Result<FrickeIndex> {
    fricke_sl2_action(v.galois(p as i64), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::j_expansion;

    fn fr(n: u64, a: i64, b: i64) -> FunctionSpec {
        FunctionSpec::Fricke(FrickeIndex::new(n, a, b).unwrap())
    }

    #[test]
    fn action_examples() {
        let v = FrickeIndex::new(2, 0, 1).unwrap();
        assert_eq!(
            fricke_sl2_action(v, &IntegerMatrix2x2::S).unwrap(),
            FrickeIndex::new(2, 1, 0).unwrap()
        );
        let u = FrickeIndex::new(3, 1, 0).unwrap();
        assert_eq!(
            fricke_sl2_action(u, &IntegerMatrix2x2::T).unwrap(),
            FrickeIndex::new(3, 1, 1).unwrap()
        );
        assert_eq!(
            fricke_sl2_action(u, &IntegerMatrix2x2::IDENTITY).unwrap(),
            u
        );
        assert!(fricke_sl2_action(u, &IntegerMatrix2x2::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_representatives(1), vec![IntegerMatrix2x2::IDENTITY]);
        for m in [2u64, 3, 4, 5, 6] {
            let reps = coset_representatives(m);
            assert_eq!(reps[0], IntegerMatrix2x2::IDENTITY);
            assert_eq!(reps.len() as u64, sl2_order(m));
            assert!(reps.iter().all(IntegerMatrix2x2::is_unimodular));
            let mut reduced: Vec<_> = reps.iter().map(|g| g.reduce(m)).collect();
            reduced.sort_by_key(|g| (g.a, g.b, g.c, g.d));
            reduced.dedup();
            assert_eq!(reduced.len() as u64, sl2_order(m));
        }
        assert_eq!(coset_representatives(3).len(), 24);
    }

    #[test]
    fn samples_are_deterministic() {
        let a = sample_cosets(55, 10, 7);
        assert_eq!(a, sample_cosets(55, 10, 7));
        assert!(a.iter().all(IntegerMatrix2x2::is_unimodular));
    }

    #[test]
    fn identity_cusp_is_rescaling() {
        for f in [FunctionSpec::J, fr(3, 1, 0), fr(4, 1, 1)] {
            let e = cusp_expansion_fp(&f, &IntegerMatrix2x2::IDENTITY, 5, 3).unwrap();
            assert_eq!(
                e,
                f.expand(15)
                    .unwrap()
                    .rescale_to_subtau(5)
                    .truncate(Rational64::from_integer(3))
            );
        }
    }

    #[test]
    fn inversion_cusp_is_case_one() {
        let split = case_split(&IntegerMatrix2x2::S, 2).unwrap();
        assert_eq!(
            split,
            CaseSplit::Divisible {
                gamma: IntegerMatrix2x2::S
            }
        );
        // [1 0; 0 2] S equals S [2 0; 0 1] as fractional linear maps
        let lhs = IntegerMatrix2x2::new(1, 0, 0, 2).mul(&IntegerMatrix2x2::S);
        let rhs = IntegerMatrix2x2::S.mul(&IntegerMatrix2x2::new(2, 0, 0, 1));
        assert_eq!(lhs, rhs);
        let e = cusp_expansion_fp(&FunctionSpec::J, &IntegerMatrix2x2::S, 2, 4).unwrap();
        assert_eq!(e, j_expansion(2).substitute_up(2));
    }

    #[test]
    fn decomposition_identities() {
        for alpha in coset_representatives(6) {
            for p in [2u64, 3, 5, 7] {
                let lhs = IntegerMatrix2x2::new(1, 0, 0, p as i64).mul(&alpha);
                let rhs = match case_split(&alpha, p).unwrap() {
                    CaseSplit::Divisible { gamma } => {
                        gamma.mul(&IntegerMatrix2x2::new(p as i64, 0, 0, 1))
                    }
                    CaseSplit::Shifted { gamma, k } => {
                        gamma.mul(&IntegerMatrix2x2::new(1, k, 0, p as i64))
                    }
                };
                assert_eq!(lhs, rhs, "{alpha} p={p}");
            }
        }
    }

    #[test]
    fn hypothesis_is_enforced() {
        let f = fr(5, 0, 1);
        assert!(matches!(
            cusp_expansion_fp(&f, &IntegerMatrix2x2::IDENTITY, 3, 2),
            Err(Error::Hypothesis(_))
        ));
        assert!(cusp_expansion_fp_unchecked(&f, &IntegerMatrix2x2::IDENTITY, 3, 2).is_ok());
        assert!(cusp_expansion_fp(&f, &IntegerMatrix2x2::IDENTITY, 4, 2).is_err());
    }

    #[test]
    fn galois_operand_matches_index_route() {
        for n in [3u64, 4, 5] {
            for v in FrickeIndex::all(n) {
                for alpha in coset_representatives(n).into_iter().step_by(7) {
                    for p in [2u64, 3, 7, 11] {
                        if n % p == 0 {
                            continue;
                        }
                        let f = FunctionSpec::Fricke(v);
                        let got = cusp_expansion_galois_operand(&f, &alpha, p, 2).unwrap();
                        let idx = galois_operand_index(v, &alpha, p).unwrap();
                        assert_eq!(got, fricke_expansion(idx, 2), "{v} {alpha} {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn operand_orders_differ() {
        let f = fr(3, 1, 0);
        let after = cusp_expansion_galois_after(&f, &IntegerMatrix2x2::T, 2, 2).unwrap();
        let operand = cusp_expansion_galois_operand(&f, &IntegerMatrix2x2::T, 2, 2).unwrap();
        assert_ne!(after, operand);
        let rational =
            cusp_expansion_galois_operand(&FunctionSpec::J, &IntegerMatrix2x2::S, 7, 2).unwrap();
        assert_eq!(rational, j_expansion(2));
    }
}
