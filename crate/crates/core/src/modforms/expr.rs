//! Names for the built-in functions: `j`, `delta`, `E4`, `E6`,
//! `fricke(N,a,b)` and `eta(m1^e1 * m2^e2 * ...)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    delta_tilde, eisenstein, eta_quotient_expansion, fricke_expansion, j_expansion,
    EtaQuotientSpec, FrickeIndex,
};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionSpec {
    J,
    Delta,
    E4,
    E6,
    Fricke(FrickeIndex),
    Eta(EtaQuotientSpec),
}

impl FunctionSpec {
    /// Expansion at the cusp at infinity below `q^prec`.
    pub fn expand(&self, prec: i64) -> Result<QSeries> {
        if prec < 1 {
            return Err(Error::InsufficientPrecision(format!(
                "precision {prec} must be at least 1"
            )));
        }
        Ok(match self {
            Self::J => j_expansion(prec),
            Self::Delta => delta_tilde(prec),
            Self::E4 => eisenstein(4, prec)?,
            Self::E6 => eisenstein(6, prec)?,
            Self::Fricke(v) => fricke_expansion(*v, prec),
            Self::Eta(spec) => eta_quotient_expansion(spec, prec),
        })
    }

    /// Whether the function is a modular function (weight zero).
    pub fn is_weight_zero(&self) -> bool {
        !matches!(self, Self::Delta | Self::E4 | Self::E6)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::J => write!(f, "j"),
            Self::Delta => write!(f, "delta"),
            Self::E4 => write!(f, "E4"),
            Self::E6 => write!(f, "E6"),
            Self::Fricke(v) => write!(f, "{v}"),
            Self::Eta(s) => write!(f, "{s}"),
        }
    }
}

fn parse_i64(s: &str, ctx: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?} in {ctx:?}")))
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "j" => return Ok(Self::J),
            "delta" => return Ok(Self::Delta),
            "E4" => return Ok(Self::E4),
            "E6" => return Ok(Self::E6),
            _ => {}
        }
        if let Some(args) = call_args(t, "fricke") {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("fricke takes (N, a, b), got {t:?}")));
            }
            let n = parse_i64(parts[0], t)?;
            if n < 2 {
                return Err(Error::InvalidFrickeIndex(format!(
                    "level {n} must be at least 2"
                )));
            }
            let v = FrickeIndex::new(n as u64, parse_i64(parts[1], t)?, parse_i64(parts[2], t)?)?;
            return Ok(Self::Fricke(v));
        }
        if let Some(args) = call_args(t, "eta") {
            let mut factors = Vec::new();
            for f in args.split('*') {
                let (m, e) = f
                    .split_once('^')
                    .ok_or_else(|| Error::Parse(format!("eta factor {f:?} must be m^e")))?;
                let m = parse_i64(m, t)?;
                if m < 1 {
                    return Err(Error::InvalidEtaQuotient(format!(
                        "scaling {m} must be positive"
                    )));
                }
                factors.push((m as u64, parse_i64(e, t)?));
            }
            return Ok(Self::Eta(EtaQuotientSpec::new(factors)?));
        }
        Err(Error::Parse(format!("unknown function {t:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for text in [
            "j",
            "delta",
            "E4",
            "E6",
            "fricke(5,0,1)",
            "eta(2^24 * 1^-24)",
        ] {
            let f: FunctionSpec = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        let f: FunctionSpec = "fricke(3, -1, 0)".parse().unwrap();
        assert_eq!(f.to_string(), "fricke(3,1,0)");
        assert!("fricke(1,0,1)".parse::<FunctionSpec>().is_err());
        assert!("fricke(4,0,0)".parse::<FunctionSpec>().is_err());
        assert!("eta(2^24)".parse::<FunctionSpec>().is_err());
        assert!("sin".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn expands() {
        let e: FunctionSpec = "eta(2^24 * 1^-24)".parse().unwrap();
        assert_eq!(e.expand(3).unwrap().to_string(), "q + 24*q^2 + O(q^3)");
        assert!(FunctionSpec::J.expand(0).is_err());
    }
}
