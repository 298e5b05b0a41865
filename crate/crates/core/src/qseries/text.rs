//! Text form: `c*q^(n/M)` terms in increasing order, `+ O(q^(K/M))` tail for
//! truncated series and an ` @ level L` suffix when `L > 1`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::QSeries;
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};

fn monomial(e: Rational64) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_one() {
        "q".into()
    } else if e.is_integer() {
        format!("q^{}", e.to_integer())
    } else {
        format!("q^({}/{})", e.numer(), e.denom())
    }
}

/// Returns the term text and whether it carries a leading minus sign.
fn render_term(e: Rational64, c: &CycNumber) -> (bool, String) {
    let mono = monomial(e);
    if let Some(n) = c.as_integer() {
        let neg = n.is_negative();
        let abs = n.abs();
        let body = if mono.is_empty() {
            abs.to_string()
        } else if abs.is_one() {
            mono
        } else {
            format!("{abs}*{mono}")
        };
        return (neg, body);
    }
    let coeff = format!("({})", c.to_bare_string());
    if mono.is_empty() {
        (false, coeff)
    } else {
        (false, format!("{coeff}*{mono}"))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (e, c) in self.iter() {
            let (neg, body) = render_term(e, c);
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if let Some(p) = self.precision() {
            let m = monomial(p);
            let tail = if m.is_empty() {
                "O(1)".to_string()
            } else {
                format!("O({m})")
            };
            if out.is_empty() {
                out = tail;
            } else {
                out.push_str(" + ");
                out.push_str(&tail);
            }
        } else if out.is_empty() {
            out.push('0');
        }
        if self.level() > 1 {
            write!(f, "{out} @ level {}", self.level())
        } else {
            write!(f, "{out}")
        }
    }
}

/// Split at top-level ` + ` / ` - ` separators, keeping the sign of each term.
fn split_terms(body: &str) -> Result<Vec<(bool, String)>> {
    let chars: Vec<char> = body.trim().chars().collect();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut neg = false;
    let mut start = 0;
    if chars.first() == Some(&'-') {
        neg = true;
        start = 1;
    }
    let mut i = start;
    while i < chars.len() {
        match chars[i] {
            '(' => depth += 1,
            ')' => depth -= 1,
            c @ ('+' | '-')
                if depth == 0 && i > 0 && chars[i - 1] == ' ' && chars.get(i + 1) == Some(&' ') =>
            {
                terms.push((
                    neg,
                    chars[start..i]
                        .iter()
                        .collect::<String>()
                        .trim()
                        .to_string(),
                ));
                neg = c == '-';
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {body:?}")));
        }
        i += 1;
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {body:?}")));
    }
    terms.push((
        neg,
        chars[start..].iter().collect::<String>().trim().to_string(),
    ));
    if terms.iter().any(|(_, t)| t.is_empty()) {
        return Err(Error::Parse(format!("empty term in {body:?}")));
    }
    Ok(terms)
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Exponent text after `q`: empty, `^k`, `^-k` or `^(a/b)`.
fn parse_exponent(s: &str) -> Result<Rational64> {
    if s.is_empty() {
        return Ok(Rational64::one());
    }
    let rest = s
        .strip_prefix('^')
        .ok_or_else(|| Error::Parse(format!("bad exponent {s:?}")))?;
    if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return match inner.split_once('/') {
            Some((a, b)) => {
                let b = parse_int(b)?;
                if b <= 0 {
                    return Err(Error::Parse(format!("bad exponent denominator in {s:?}")));
                }
                Ok(Rational64::new(parse_int(a)?, b))
            }
            None => Ok(Rational64::from_integer(parse_int(inner)?)),
        };
    }
    Ok(Rational64::from_integer(parse_int(rest)?))
}

/// Position of a top-level `q`, if any.
fn find_q(term: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in term.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            'q' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_coefficient(s: &str, level: u64) -> Result<CycNumber> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(CycNumber::one(level));
    }
    CycNumber::parse_at_level(s, level)
}

/// Parse the series text format (the inverse of `Display`).
pub fn parse_series(text: &str) -> Result<QSeries> {
    let (body, level) = match text.rsplit_once("@ level") {
        Some((b, l)) => {
            let level: u64 = l
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad level in {text:?}")))?;
            if level == 0 {
                return Err(Error::Parse("level must be positive".into()));
            }
            (b, level)
        }
        None => (text, 1),
    };
    let mut prec: Option<Rational64> = None;
    let mut terms: Vec<(Rational64, CycNumber)> = Vec::new();
    for (neg, term) in split_terms(body)? {
        if let Some(inner) = term.strip_prefix("O(").and_then(|t| t.strip_suffix(')')) {
            if neg || prec.is_some() {
                return Err(Error::Parse(format!("misplaced O-term in {text:?}")));
            }
            let inner = inner.trim();
            prec = Some(if inner == "1" {
                Rational64::zero()
            } else {
                let rest = inner
                    .strip_prefix('q')
                    .ok_or_else(|| Error::Parse(format!("bad O-term {term:?}")))?;
                parse_exponent(rest)?
            });
            continue;
        }
        if prec.is_some() {
            return Err(Error::Parse(format!("term after O-term in {text:?}")));
        }
        let (coeff, e) = match find_q(&term) {
            Some(pos) => {
                let c = term[..pos].trim_end();
                let c = match c.strip_suffix('*') {
                    Some(c) => c,
                    None if c.is_empty() => c,
                    None => return Err(Error::Parse(format!("missing '*' in {term:?}"))),
                };
                (
                    parse_coefficient(c, level)?,
                    parse_exponent(&term[pos + 1..])?,
                )
            }
            None if term == "0" => continue,
            None => (parse_coefficient(&term, level)?, Rational64::zero()),
        };
        terms.push((e, if neg { -coeff } else { coeff }));
    }
    let m = terms
        .iter()
        .map(|(e, _)| *e.denom())
        .chain(prec.map(|p| *p.denom()))
        .fold(1i64, |a, b| a.lcm(&b));
    let scale = Rational64::from_integer(m);
    let mut keyed = std::collections::BTreeMap::new();
    for (e, c) in terms {
        let k = (e * scale).to_integer();
        if keyed.insert(k, c).is_some() {
            return Err(Error::Parse(format!("repeated exponent {e} in {text:?}")));
        }
    }
    QSeries::new(
        m as u64,
        level,
        keyed,
        prec.map(|p| (p * scale).to_integer()),
    )
}

impl FromStr for QSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_series(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn renders_j_prefix() {
        let c: Vec<BigInt> = [1i64, 744, 196884, 21493760]
            .iter()
            .map(|&x| x.into())
            .collect();
        let j = QSeries::from_integers(1, -1, &c, Some(3));
        let s = j.to_string();
        assert_eq!(s, "q^-1 + 744 + 196884*q + 21493760*q^2 + O(q^3)");
        assert_eq!(s.parse::<QSeries>().unwrap(), j);
    }

    #[test]
    fn round_trips() {
        let cases = [
            "q^(-1/3) - 2*q^(2/3) + O(q^(5/3))",
            "(1 + 2*z^3)/5*q^(1/12) + (-z)*q + O(q^2) @ level 12",
            "-q + O(1)",
            "O(q^(7/2))",
            "0",
            "(1/2) + q^5",
            "(z - z^2)*q^-2 - 7 @ level 5",
        ];
        for text in cases {
            let s: QSeries = text.parse().unwrap();
            let again: QSeries = s.to_string().parse().unwrap();
            assert_eq!(s, again, "{text}");
            assert_eq!(s.to_string(), again.to_string());
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!("q^(1/0)".parse::<QSeries>().is_err());
        assert!("O(q) + q".parse::<QSeries>().is_err());
        assert!("(1 + q".parse::<QSeries>().is_err());
        assert!("3q".parse::<QSeries>().is_err());
    }
}
