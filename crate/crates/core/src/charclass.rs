//! Classes in the H-graded Chern lattice.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Result, TiltError};
use crate::geometry::Geometry;
use crate::quadratic::QuadraticNumber;
use crate::rational::{fmt_rat, int, on_step, parse_rat, Rat};

/// Numerical class `(v0, v1, v2, v3?)` with an optional explicit pairing
/// `g1` of the auxiliary divisor against `ch_1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharVector {
    pub v0: Rat,
    pub v1: Rat,
    pub v2: Rat,
    pub v3: Option<Rat>,
    pub g1: Option<Rat>,
}

/// A slope that may be `+inf`. Finite values order below infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Finite(Rat),
    Infinite,
}

impl Slope {
    pub fn ratio(num: Rat, den: &Rat) -> Self {
        if den.is_zero() {
            Slope::Infinite
        } else {
            Slope::Finite(num / den)
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{}", fmt_rat(r)),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

impl CharVector {
    /// Class without `v3`. No lattice check.
    pub fn new(v0: Rat, v1: Rat, v2: Rat) -> Self {
        Self { v0, v1, v2, v3: None, g1: None }
    }

    /// Class with `v3`. No lattice check.
    pub fn new3(v0: Rat, v1: Rat, v2: Rat, v3: Rat) -> Self {
        Self { v0, v1, v2, v3: Some(v3), g1: None }
    }

    pub fn with_g1(mut self, g1: Rat) -> Self {
        self.g1 = Some(g1);
        self
    }

    /// Build from 3 or 4 components.
    pub fn from_components(c: &[Rat]) -> Result<Self> {
        match c {
            [a, b, d] => Ok(Self::new(a.clone(), b.clone(), d.clone())),
            [a, b, d, e] => Ok(Self::new3(a.clone(), b.clone(), d.clone(), e.clone())),
            _ => Err(TiltError::parse(
                "class",
                format!("expected 3 or 4 components, got {}", c.len()),
            )),
        }
    }

    /// Build from components and reject anything off the geometry lattice.
    pub fn on_lattice(c: &[Rat], geom: &Geometry) -> Result<Self> {
        let v = Self::from_components(c)?;
        v.check_lattice(geom)?;
        Ok(v)
    }

    pub fn components(&self) -> Vec<Rat> {
        let mut out = vec![self.v0.clone(), self.v1.clone(), self.v2.clone()];
        if let Some(v3) = &self.v3 {
            out.push(v3.clone());
        }
        out
    }

    /// The truncation `(v0, v1, v2)`.
    pub fn truncated(&self) -> Self {
        Self::new(self.v0.clone(), self.v1.clone(), self.v2.clone())
    }

    pub fn check_lattice(&self, geom: &Geometry) -> Result<()> {
        for (i, c) in self.components().iter().enumerate() {
            if !on_step(c, &geom.lattice[i]) {
                return Err(TiltError::OffLattice {
                    index: i,
                    value: fmt_rat(c),
                    step: fmt_rat(&geom.lattice[i]),
                });
            }
        }
        Ok(())
    }

    pub fn is_on_lattice(&self, geom: &Geometry) -> bool {
        self.check_lattice(geom).is_ok()
    }

    pub fn v3(&self) -> Result<&Rat> {
        self.v3.as_ref().ok_or(TiltError::MissingV3)
    }

    /// Explicit `g1`, or the rank-one default `xi * v1`.
    pub fn g1_or_default(&self, geom: &Geometry) -> Rat {
        match &self.g1 {
            Some(g) => g.clone(),
            None => geom.xi() * &self.v1,
        }
    }

    /// Tensor by `O(mH)`.
    pub fn twist(&self, m: &Rat, geom: &Geometry) -> Self {
        let m2 = m * m / int(2);
        let m3 = m * m * m / int(6);
        let v1 = &self.v1 + m * &self.v0;
        let v2 = &self.v2 + m * &self.v1 + &m2 * &self.v0;
        let v3 = self
            .v3
            .as_ref()
            .map(|v3| v3 + m * &self.v2 + &m2 * &self.v1 + &m3 * &self.v0);
        let g1 = self.g1.as_ref().map(|g| g + m * geom.xi() * &self.v0);
        Self { v0: self.v0.clone(), v1, v2, v3, g1 }
    }

    /// Twist that also insists the result stays on the lattice.
    pub fn twist_strict(&self, m: &Rat, geom: &Geometry) -> Result<Self> {
        let t = self.twist(m, geom);
        t.check_lattice(geom)?;
        Ok(t)
    }

    /// Derived dual: odd components change sign.
    pub fn dual(&self) -> Self {
        Self {
            v0: self.v0.clone(),
            v1: -self.v1.clone(),
            v2: self.v2.clone(),
            v3: self.v3.as_ref().map(|x| -x.clone()),
            g1: self.g1.as_ref().map(|x| -x.clone()),
        }
    }

    /// `v1^2 - 2 v0 v2`.
    pub fn discriminant(&self) -> Rat {
        &self.v1 * &self.v1 - int(2) * &self.v0 * &self.v2
    }

    /// `v1 / v0`, or `+inf` in rank zero.
    pub fn slope_mu(&self) -> Slope {
        Slope::ratio(self.v1.clone(), &self.v0)
    }

    /// The point where the twisted `v2` vanishes: `v2/v1` in rank zero,
    /// `(v1 - sqrt(disc))/v0` otherwise.
    pub fn bbar(&self) -> Result<QuadraticNumber> {
        let disc = self.discriminant();
        if disc.is_negative() {
            return Err(TiltError::pre(format!(
                "discriminant {} is negative",
                fmt_rat(&disc)
            )));
        }
        if self.v0.is_zero() {
            if self.v1.is_zero() {
                return Err(TiltError::pre("bbar undefined when v0 = v1 = 0"));
            }
            return Ok(QuadraticNumber::rational(&self.v2 / &self.v1));
        }
        let inv = Rat::one() / &self.v0;
        QuadraticNumber::new(&self.v1 * &inv, -inv, disc)
    }

    /// Components twisted by `-b`: `v^b_i = sum_j (-b)^j/j! v_{i-j}`.
    pub fn twisted(&self, b: &QuadraticNumber) -> Result<Vec<QuadraticNumber>> {
        let q = |r: &Rat| QuadraticNumber::rational(r.clone());
        let b2 = b.mul(b)?.scale(&Rat::new(1.into(), 2.into()));
        let b3 = b2.mul(b)?.scale(&Rat::new(1.into(), 3.into()));
        let t0 = q(&self.v0);
        let t1 = q(&self.v1).sub(&b.scale(&self.v0))?;
        let t2 = q(&self.v2).sub(&b.scale(&self.v1))?.add(&b2.scale(&self.v0))?;
        let mut out = vec![t0, t1, t2];
        if let Some(v3) = &self.v3 {
            let t3 = q(v3)
                .sub(&b.scale(&self.v2))?
                .add(&b2.scale(&self.v1))?
                .sub(&b3.scale(&self.v0))?;
            out.push(t3);
        }
        Ok(out)
    }

    /// Rational specialization of [`CharVector::twisted`].
    pub fn twisted_rat(&self, b: &Rat) -> Vec<Rat> {
        let b2 = b * b / int(2);
        let b3 = b * b * b / int(6);
        let mut out = vec![
            self.v0.clone(),
            &self.v1 - b * &self.v0,
            &self.v2 - b * &self.v1 + &b2 * &self.v0,
        ];
        if let Some(v3) = &self.v3 {
            out.push(v3 - b * &self.v2 + &b2 * &self.v1 - &b3 * &self.v0);
        }
        out
    }

    /// `v1 - b v0`.
    pub fn v1_at(&self, b: &Rat) -> Rat {
        &self.v1 - b * &self.v0
    }

    /// Euler characteristic via Riemann-Roch in the rank-one shadow.
    pub fn euler_char(&self, geom: &Geometry) -> Result<Rat> {
        if geom.dim != 3 {
            return Err(TiltError::pre("euler characteristic needs a threefold"));
        }
        let v3 = self.v3()?;
        Ok(v3 - &geom.k_coeff / int(2) * &self.v2
            + &geom.td2_dot_h / &geom.h_top * &self.v1
            + &geom.chi_o / &geom.h_top * &self.v0)
    }

    /// `(v0, v1, v2)` is a rational multiple of `other`'s, both non-zero.
    pub fn proportional(&self, other: &Self) -> bool {
        let a = [&self.v0, &self.v1, &self.v2];
        let b = [&other.v0, &other.v1, &other.v2];
        if a.iter().all(|x| x.is_zero()) || b.iter().all(|x| x.is_zero()) {
            return true;
        }
        (0..3).all(|i| (0..3).all(|j| a[i] * b[j] == a[j] * b[i]))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            v0: &self.v0 + &o.v0,
            v1: &self.v1 + &o.v1,
            v2: &self.v2 + &o.v2,
            v3: zip_opt(&self.v3, &o.v3, |a, b| a + b),
            g1: zip_opt(&self.g1, &o.g1, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self {
            v0: &self.v0 * k,
            v1: &self.v1 * k,
            v2: &self.v2 * k,
            v3: self.v3.as_ref().map(|x| x * k),
            g1: self.g1.as_ref().map(|x| x * k),
        }
    }

    /// Lexicographic order on `(v0, v1, v2, v3)`.
    pub fn lex_cmp(&self, o: &Self) -> Ordering {
        (&self.v0, &self.v1, &self.v2, &self.v3).cmp(&(&o.v0, &o.v1, &o.v2, &o.v3))
    }

    /// JSON array of `"p/q"` strings.
    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.components()
                .iter()
                .map(|c| Value::String(fmt_rat(c)))
                .collect(),
        )
    }

    /// Parse either a bare array of `"p/q"` strings or an object
    /// `{"v": [...], "g1": "p/q"}`.
    pub fn from_json_value(val: &Value) -> Result<Self> {
        let strings = |arr: &Vec<Value>| -> Result<Vec<Rat>> {
            arr.iter()
                .enumerate()
                .map(|(i, x)| match x {
                    Value::String(s) => parse_rat(&format!("class[{i}]"), s),
                    Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
                    _ => Err(TiltError::parse(format!("class[{i}]"), "expected a \"p/q\" string")),
                })
                .collect()
        };
        match val {
            Value::Array(arr) => Self::from_components(&strings(arr)?),
            Value::Object(map) => {
                if let Some(k) = map.keys().find(|k| *k != "v" && *k != "g1") {
                    return Err(TiltError::parse("class", format!("unknown key {k:?}")));
                }
                let arr = match map.get("v") {
                    Some(Value::Array(a)) => a,
                    _ => return Err(TiltError::parse("class", "missing array \"v\"")),
                };
                let mut v = Self::from_components(&strings(arr)?)?;
                if let Some(g) = map.get("g1") {
                    let s = g
                        .as_str()
                        .ok_or_else(|| TiltError::parse("g1", "expected a \"p/q\" string"))?;
                    v.g1 = Some(parse_rat("g1", s)?);
                }
                Ok(v)
            }
            _ => Err(TiltError::parse("class", "expected an array or object")),
        }
    }
}

fn zip_opt(a: &Option<Rat>, b: &Option<Rat>, f: impl Fn(&Rat, &Rat) -> Rat) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(f(x, y)),
        _ => None,
    }
}

impl fmt::Display for CharVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components().iter().map(fmt_rat).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Split of the discriminant of a sum of positive-rank-or-not classes.
///
/// For parts `(r_i, c_i, t_i)` with `r_i != 0` and total `(r, c, t)`, returns
/// `(weighted, spread)` with
/// `weighted = sum r/r_i (c_i^2 - 2 r_i t_i)` and
/// `spread = sum_{j<k} r_j r_k (c_j/r_j - c_k/r_k)^2`, so that the
/// discriminant of the total equals `weighted - spread` whenever `r != 0`.
pub fn discriminant_split(parts: &[CharVector]) -> Result<(Rat, Rat)> {
    if parts.iter().any(|p| p.v0.is_zero()) {
        return Err(TiltError::pre("every part needs non-zero v0"));
    }
    let r: Rat = parts.iter().map(|p| p.v0.clone()).sum();
    let weighted = parts
        .iter()
        .map(|p| &r / &p.v0 * p.discriminant())
        .sum();
    let mut spread = Rat::zero();
    for (j, pj) in parts.iter().enumerate() {
        for pk in &parts[j + 1..] {
            let d = &pj.v1 / &pj.v0 - &pk.v1 / &pk.v0;
            spread += &pj.v0 * &pk.v0 * &d * &d;
        }
    }
    Ok((weighted, spread))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fano_preset;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn cv(a: i64, b: i64, c: Rat) -> CharVector {
        CharVector::new(int(a), int(b), c)
    }

    #[test]
    fn twist_examples() {
        let g = fano_preset(2, int(5)).unwrap();
        let o = CharVector::new3(int(5), int(0), int(0), int(0));
        let t = o.twist(&int(1), &g);
        assert_eq!(t, CharVector::new3(int(5), int(5), rat(5, 2), rat(5, 6)));
        assert_eq!(o.twist(&int(0), &g), o);
        assert_eq!(t.twist(&int(-1), &g), o);
    }

    #[test]
    fn dual_examples() {
        let v = CharVector::new3(int(5), int(5), rat(5, 2), rat(5, 6));
        assert_eq!(v.dual(), CharVector::new3(int(5), int(-5), rat(5, 2), rat(-5, 6)));
        assert_eq!(v.dual().dual(), v);
        let f = CharVector::new3(int(3), int(0), int(7), int(0));
        assert_eq!(f.dual(), f);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(cv(28, 14, int(2)).discriminant(), int(84));
        assert_eq!(cv(3, 6, int(6)).discriminant(), int(0));
    }

    #[test]
    fn euler_examples() {
        let g = fano_preset(2, int(5)).unwrap();
        let o = CharVector::new3(int(5), int(0), int(0), int(0));
        assert_eq!(o.euler_char(&g).unwrap(), int(1));
        let m = CharVector::new3(int(5), int(-5), rat(5, 2), rat(-5, 6));
        assert_eq!(m.euler_char(&g).unwrap(), int(0));
        for d in [2, 10, 14, 22] {
            let g = fano_preset(1, int(d)).unwrap();
            let o = CharVector::new3(int(d), int(0), int(0), int(0));
            assert_eq!(o.twist(&int(-1), &g).euler_char(&g).unwrap(), int(-1));
        }
        assert_eq!(cv(1, 0, int(0)).euler_char(&g), Err(TiltError::MissingV3));
    }

    #[test]
    fn slope_examples() {
        assert_eq!(cv(5, 5, int(0)).slope_mu(), Slope::Finite(int(1)));
        assert_eq!(cv(0, 1, int(0)).slope_mu(), Slope::Infinite);
        assert!(Slope::Finite(int(1000)) < Slope::Infinite);
    }

    #[test]
    fn bbar_examples() {
        assert_eq!(cv(0, 2, int(3)).bbar().unwrap(), QuadraticNumber::rational(rat(3, 2)));
        assert_eq!(cv(2, 2, int(1)).bbar().unwrap(), QuadraticNumber::rational(int(1)));
        let v = cv(1, 0, int(-1));
        let b = v.bbar().unwrap();
        assert_eq!(b, QuadraticNumber::new(int(0), int(-1), int(2)).unwrap());
        assert!(v.twisted(&b).unwrap()[2].is_zero());
        assert!(cv(1, 0, int(1)).bbar().is_err());
        assert!(cv(0, 0, int(1)).bbar().is_err());
    }

    #[test]
    fn twisted_point_class() {
        let v = CharVector::new3(int(1), int(0), int(0), int(0));
        let b = rat(3, 7);
        let t = v.twisted_rat(&b);
        assert_eq!(t, vec![int(1), -b.clone(), &b * &b / int(2), -(&b * &b * &b) / int(6)]);
    }

    #[test]
    fn lattice_check() {
        let g = fano_preset(1, int(14)).unwrap();
        assert!(CharVector::on_lattice(&[int(28), int(14), int(2)], &g).is_ok());
        assert!(matches!(
            CharVector::on_lattice(&[int(28), int(7), int(2)], &g),
            Err(TiltError::OffLattice { index: 1, .. })
        ));
    }

    #[test]
    fn json_forms() {
        let v: Value = serde_json::from_str(r#"["1/1","0/1","-1/2"]"#).unwrap();
        assert_eq!(CharVector::from_json_value(&v).unwrap(), cv(1, 0, rat(-1, 2)));
        let v: Value = serde_json::from_str(r#"{"v":["1","0","0","0"],"g1":"1/3"}"#).unwrap();
        let c = CharVector::from_json_value(&v).unwrap();
        assert_eq!(c.g1, Some(rat(1, 3)));
        let v: Value = serde_json::from_str(r#"{"v":["1","0","0"],"x":"1"}"#).unwrap();
        assert!(CharVector::from_json_value(&v).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-40i64..40, 1i64..9).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn discriminant_twist_and_dual_invariant(
            v0 in small_rat(), v1 in small_rat(), v2 in small_rat(), b in small_rat()
        ) {
            let v = CharVector::new(v0, v1, v2);
            let t = v.twisted_rat(&b);
            let tv = CharVector::new(t[0].clone(), t[1].clone(), t[2].clone());
            prop_assert_eq!(tv.discriminant(), v.discriminant());
            prop_assert_eq!(v.dual().discriminant(), v.discriminant());
        }

        #[test]
        fn euler_char_is_cubic_in_twist(
            v0 in small_rat(), v1 in small_rat(), v2 in small_rat(), v3 in small_rat()
        ) {
            let g = fano_preset(2, int(3)).unwrap();
            let v = CharVector::new3(v0.clone(), v1, v2, v3);
            let chi: Vec<Rat> = (0..5)
                .map(|m| v.twist(&int(m), &g).euler_char(&g).unwrap())
                .collect();
            let mut diffs = chi.clone();
            for _ in 0..3 {
                diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
            }
            prop_assert_eq!(&diffs[0], &v0);
            prop_assert_eq!(&diffs[1], &v0);
        }

        #[test]
        fn slope_flips_under_dual(v0 in small_rat(), v1 in small_rat()) {
            prop_assume!(!v0.is_zero());
            let v = CharVector::new(v0, v1, int(0));
            let Slope::Finite(s) = v.slope_mu() else { unreachable!() };
            prop_assert_eq!(v.dual().slope_mu(), Slope::Finite(-s));
        }
    }
}
