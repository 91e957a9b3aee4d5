//! Exact rational helpers shared by every module.
//!
//! All numeric state in the crate is a [`Rat`]. Text I/O uses the canonical
//! `"p/q"` form: lowest terms, positive denominator, denominator always
//! printed (so `5` is written `"5/1"`).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, TiltError};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Rat {
    rat(1, 2)
}

/// Canonical `"p/q"` text.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"` or a bare integer `"p"`. `field` names the value in errors.
pub fn parse_rat(field: &str, s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |why: &str| TiltError::parse(field, format!("{why} in {s:?}"));
    let parse_int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        if t.is_empty() || t.starts_with('+') {
            return Err(bad("expected an integer"));
        }
        t.parse::<BigInt>().map_err(|_| bad("expected an integer"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Parse a comma-separated list of rationals.
pub fn parse_rat_list(field: &str, s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .enumerate()
        .map(|(i, t)| parse_rat(&format!("{field}[{i}]"), t))
        .collect()
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn floor(r: &Rat) -> Rat {
    r.floor()
}

pub fn max_rat(a: &Rat, b: &Rat) -> Rat {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn min_rat(a: &Rat, b: &Rat) -> Rat {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn sign(r: &Rat) -> i32 {
    match r.cmp(&Rat::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Exact square root when `r` is the square of a rational.
pub fn sqrt_exact(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Rational bounds `lo <= sqrt(r) <= hi` with `hi - lo <= eps`.
///
/// `r` must be non-negative and `eps` positive. Exact squares return `lo == hi`.
pub fn sqrt_bounds(r: &Rat, eps: &Rat) -> (Rat, Rat) {
    assert!(!r.is_negative(), "sqrt of negative rational");
    assert!(eps.is_positive(), "sqrt precision must be positive");
    if let Some(s) = sqrt_exact(r) {
        return (s.clone(), s);
    }
    // sqrt(n/d) = sqrt(n*d)/d; scale by 2^k until 1/(d*2^k) <= eps.
    let nd = r.numer() * r.denom();
    let d = r.denom().clone();
    let mut k: u32 = 0;
    while Rat::new(BigInt::one(), &d << k) > *eps {
        k += 1;
    }
    let scaled = &nd << (2 * k);
    let root = scaled.sqrt();
    let den = &d << k;
    let lo = Rat::new(root.clone(), den.clone());
    let hi = Rat::new(root + 1, den);
    (lo, hi)
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Largest integer `<= r`.
pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Least common multiple of denominators, used to clear fractions.
pub fn denom_lcm<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// `m * step` for every integer `m` with `lo <= m * step <= hi`.
pub fn lattice_points(step: &Rat, lo: &Rat, hi: &Rat) -> Vec<Rat> {
    debug_assert!(step.is_positive());
    if lo > hi {
        return Vec::new();
    }
    let first = ceil_int(&(lo / step));
    let last = floor_int(&(hi / step));
    let mut out = Vec::new();
    let mut m = first;
    while m <= last {
        out.push(Rat::from_integer(m.clone()) * step);
        m += 1;
    }
    out
}

/// `r` is an integer multiple of `step`.
pub fn on_step(r: &Rat, step: &Rat) -> bool {
    (r / step).is_integer()
}

pub(crate) mod serde_rat {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat("rational", &s).map_err(D::Error::custom)
    }
}

pub(crate) mod serde_rat_array {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::ser::SerializeSeq;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(4))?;
        for r in v {
            seq.serialize_element(&fmt_rat(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<[Rat; 4], D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        if raw.len() != 4 {
            return Err(D::Error::custom(format!(
                "lattice must have 4 steps, got {}",
                raw.len()
            )));
        }
        let mut out: Vec<Rat> = Vec::with_capacity(4);
        for (i, s) in raw.iter().enumerate() {
            out.push(parse_rat(&format!("lattice[{i}]"), s).map_err(D::Error::custom)?);
        }
        Ok([
            out[0].clone(),
            out[1].clone(),
            out[2].clone(),
            out[3].clone(),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("x", "6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("x", "-3").unwrap(), int(-3));
        assert_eq!(fmt_rat(&int(5)), "5/1");
        assert_eq!(fmt_rat(&rat(2, -4)), "-1/2");
        assert!(parse_rat("x", "1/0").is_err());
        assert!(parse_rat("x", "abc").is_err());
        assert!(parse_rat("x", "1.5").is_err());
        match parse_rat("h_top", "1//2") {
            Err(TiltError::Parse { field, .. }) => assert_eq!(field, "h_top"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let eps = rat(1, 1 << 20);
        let (lo, hi) = sqrt_bounds(&int(2), &eps);
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(&hi - &lo <= eps);
        let (lo, hi) = sqrt_bounds(&rat(9, 4), &eps);
        assert_eq!(lo, rat(3, 2));
        assert_eq!(hi, rat(3, 2));
    }

    #[test]
    fn lattice_enumeration() {
        let pts = lattice_points(&rat(1, 2), &rat(-1, 3), &int(1));
        assert_eq!(pts, vec![int(0), rat(1, 2), int(1)]);
        assert!(lattice_points(&int(1), &int(2), &int(1)).is_empty());
    }
}
