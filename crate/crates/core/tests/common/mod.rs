#![allow(dead_code)]

use modkron::arith::euler_phi;
use modkron::{CycNumber, QSeries};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

pub fn cyc_from(level: u64, coords: &[i64], denom: i64) -> CycNumber {
    let coords = coords.iter().map(|&c| BigInt::from(c)).collect();
    CycNumber::new(level, coords, BigInt::from(denom)).unwrap()
}

/// Random element of `Z[zeta_m]` with coordinates in `[-bound, bound]`.
pub fn integral(level: u64, bound: i64) -> impl Strategy<Value = CycNumber> {
    let d = euler_phi(level) as usize;
    prop::collection::vec(-bound..=bound, d).prop_map(move |c| cyc_from(level, &c, 1))
}

/// Random element of `Q(zeta_m)` with a small denominator.
pub fn rational(level: u64, bound: i64) -> impl Strategy<Value = CycNumber> {
    let d = euler_phi(level) as usize;
    (prop::collection::vec(-bound..=bound, d), 1i64..6)
        .prop_map(move |(c, den)| cyc_from(level, &c, den))
}

/// Truncated series over `Q(zeta_level)` in powers of `q^(1/m)`.
pub fn series(
    level: u64,
    m: u64,
    coeff: BoxedStrategy<CycNumber>,
) -> impl Strategy<Value = QSeries> {
    (-3i64..3, prop::collection::vec(coeff, 1..7), 1i64..6).prop_map(move |(first, cs, extra)| {
        let len = cs.len() as i64;
        let terms: Vec<(i64, CycNumber)> = cs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (first + i as i64, c))
            .collect();
        QSeries::new(m, level, terms, Some(first + len + extra)).unwrap()
    })
}

pub fn integral_series(level: u64, m: u64) -> impl Strategy<Value = QSeries> {
    series(level, m, integral(level, 20).boxed())
}

/// An integral series drawn from a seeded generator, used by the acceptance
/// suites where the draw count is fixed. At most 7 terms, known `pad` places
/// beyond the last one.
pub fn random_integral_series<R: Rng>(rng: &mut R, level: u64, bound: i64, pad: i64) -> QSeries {
    let d = euler_phi(level) as usize;
    let first = rng.gen_range(-2..3);
    let len = rng.gen_range(1..8);
    let terms: Vec<(i64, CycNumber)> = (0..len)
        .map(|i| {
            let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-bound..=bound)).collect();
            (first + i, cyc_from(level, &c, 1))
        })
        .collect();
    QSeries::new(1, level, terms, Some(first + len + pad)).unwrap()
}

pub fn random_integral<R: Rng>(rng: &mut R, level: u64, bound: i64) -> CycNumber {
    let d = euler_phi(level) as usize;
    let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-bound..=bound)).collect();
    cyc_from(level, &c, 1)
}
