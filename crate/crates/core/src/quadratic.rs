//! Exact arithmetic in a real quadratic field `Q(sqrt(rad))`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Result, TiltError};
use crate::rational::{fmt_rat, sign, sqrt_bounds, sqrt_exact, Rat};

/// The real number `p + q * sqrt(rad)`.
///
/// Values are kept canonical: a rational radicand that is a perfect square is
/// folded into `p`, and a value with `q == 0` carries `rad == 0`. Binary
/// operations require both operands to live in the same field unless one of
/// them is rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    p: Rat,
    q: Rat,
    rad: Rat,
}

impl QuadraticNumber {
    pub fn new(p: Rat, q: Rat, rad: Rat) -> Result<Self> {
        if rad.is_negative() {
            return Err(TiltError::pre(format!(
                "negative radicand {}",
                fmt_rat(&rad)
            )));
        }
        Ok(Self::canonical(p, q, rad))
    }

    pub fn rational(p: Rat) -> Self {
        Self {
            p,
            q: Rat::zero(),
            rad: Rat::zero(),
        }
    }

    /// `sqrt(rad)` itself.
    pub fn sqrt(rad: Rat) -> Result<Self> {
        Self::new(Rat::zero(), Rat::one(), rad)
    }

    fn canonical(p: Rat, q: Rat, rad: Rat) -> Self {
        if q.is_zero() || rad.is_zero() {
            return Self::rational(p);
        }
        if let Some(s) = sqrt_exact(&rad) {
            return Self::rational(p + q * s);
        }
        Self { p, q, rad }
    }

    pub fn p(&self) -> &Rat {
        &self.p
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn rad(&self) -> &Rat {
        &self.rad
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    fn common_rad(&self, other: &Self) -> Result<Rat> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(Rat::zero()),
            (true, false) => Ok(other.rad.clone()),
            (false, true) => Ok(self.rad.clone()),
            (false, false) if self.rad == other.rad => Ok(self.rad.clone()),
            _ => Err(TiltError::MixedRadicals(
                fmt_rat(&self.rad),
                fmt_rat(&other.rad),
            )),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let rad = self.common_rad(other)?;
        Ok(Self::canonical(
            &self.p + &other.p,
            &self.q + &other.q,
            rad,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let rad = self.common_rad(other)?;
        let p = &self.p * &other.p + &self.q * &other.q * &rad;
        let q = &self.p * &other.q + &self.q * &other.p;
        Ok(Self::canonical(p, q, rad))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(TiltError::pre("division by zero in quadratic field"));
        }
        let rad = self.common_rad(other)?;
        // multiply by the conjugate of the denominator
        let norm = &other.p * &other.p - &other.q * &other.q * &rad;
        let conj = Self::canonical(other.p.clone(), -other.q.clone(), rad);
        let num = self.mul(&conj)?;
        Ok(num.scale(&(Rat::one() / norm)))
    }

    pub fn neg(&self) -> Self {
        Self {
            p: -self.p.clone(),
            q: -self.q.clone(),
            rad: self.rad.clone(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::canonical(&self.p * k, &self.q * k, self.rad.clone())
    }

    pub fn add_rat(&self, k: &Rat) -> Self {
        Self::canonical(&self.p + k, self.q.clone(), self.rad.clone())
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::rational(Rat::one());
        for _ in 0..e {
            // same field throughout
            acc = acc.mul(self).expect("powers stay in one field");
        }
        acc
    }

    /// Exact sign in {-1, 0, 1}.
    pub fn signum(&self) -> i32 {
        let sp = sign(&self.p);
        let sq = sign(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 {
            return sq;
        }
        if sp == sq {
            return sp;
        }
        // opposite signs: compare p^2 with q^2 rad
        let lhs = &self.p * &self.p;
        let rhs = &self.q * &self.q * &self.rad;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison of two values of the same field.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(match self.sub(other)?.signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Rational enclosure `[lo, hi]` of width at most `eps`.
    pub fn bounds(&self, eps: &Rat) -> (Rat, Rat) {
        if self.is_rational() {
            return (self.p.clone(), self.p.clone());
        }
        let aq = self.q.abs();
        let (slo, shi) = sqrt_bounds(&self.rad, &(eps / &aq));
        let a = &self.p + &self.q * &slo;
        let b = &self.p + &self.q * &shi;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

impl From<Rat> for QuadraticNumber {
    fn from(r: Rat) -> Self {
        Self::rational(r)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", fmt_rat(&self.p))
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                fmt_rat(&self.p),
                fmt_rat(&self.q),
                fmt_rat(&self.rad)
            )
        }
    }
}
