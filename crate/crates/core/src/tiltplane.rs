//! The `(b, w)` half-plane: central charges, slopes, the admissible region
//! and the support-property constant.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::charclass::{CharVector, Slope};
use crate::error::{Result, TiltError};
use crate::poly::Poly;
use crate::rational::{fmt_rat, half, int, min_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TiltPoint {
    pub b: Rat,
    pub w: Rat,
}

impl TiltPoint {
    pub fn new(b: Rat, w: Rat) -> Self {
        Self { b, w }
    }
}

/// Parabolic bound `x^2/2 + defect` on the Le Potier function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LePotierBound {
    defect: Rat,
}

impl LePotierBound {
    pub fn new(defect: Rat) -> Result<Self> {
        if defect.is_negative() {
            return Err(TiltError::pre("Le Potier defect must be non-negative"));
        }
        Ok(Self { defect })
    }

    /// The standard bound `x^2/2`.
    pub fn standard() -> Self {
        Self { defect: Rat::zero() }
    }

    pub fn defect(&self) -> &Rat {
        &self.defect
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        x * x / int(2) + &self.defect
    }
}

/// `Z^{b,w}(v) = -v2 + w v0 + i (v1 - b v0)`.
pub fn central_charge(v: &CharVector, p: &TiltPoint) -> (Rat, Rat) {
    (-&v.v2 + &p.w * &v.v0, v.v1_at(&p.b))
}

/// `(v2 - w v0) / (v1 - b v0)`, `+inf` on a zero denominator.
pub fn nu_slope(v: &CharVector, p: &TiltPoint) -> Slope {
    Slope::ratio(&v.v2 - &p.w * &v.v0, &v.v1_at(&p.b))
}

/// `Z_{a,b}(v) = -v2^b + a^2/2 v0 + i v1^b`.
pub fn z_ab(v: &CharVector, a: &Rat, b: &Rat) -> Result<(Rat, Rat)> {
    if !a.is_positive() {
        return Err(TiltError::pre("a must be positive"));
    }
    let t = v.twisted_rat(b);
    Ok((-&t[2] + a * a / int(2) * &v.v0, t[1].clone()))
}

/// Strict membership `w > b^2/2 + D`.
pub fn region_contains(p: &TiltPoint, lp: &LePotierBound) -> bool {
    p.w > lp.eval(&p.b)
}

pub(crate) fn require_region(p: &TiltPoint, lp: &LePotierBound) -> Result<()> {
    if region_contains(p, lp) {
        Ok(())
    } else {
        Err(TiltError::OutsideRegion {
            b: fmt_rat(&p.b),
            w: fmt_rat(&p.w),
            defect: fmt_rat(lp.defect()),
        })
    }
}

/// Lower bound on `w` of the restricted range at `b`.
pub fn restricted_range_min_w(b: &Rat) -> Rat {
    let fl = b.floor();
    let frac = b - &fl;
    b * b / int(2) + half() * &frac * (fl + Rat::one() - b)
}

/// `(v1/v0, v2/v0)`.
pub fn pi_projection(v: &CharVector) -> Result<(Rat, Rat)> {
    if v.v0.is_zero() {
        return Err(TiltError::pre("projection undefined for v0 = 0"));
    }
    Ok((&v.v1 / &v.v0, &v.v2 / &v.v0))
}

/// `floor(2^k sqrt(x)) / 2^k` for `x >= 0`.
fn sqrt_floor_dyadic(x: &Rat, k: u32) -> Rat {
    let scaled = x * Rat::from_integer(BigInt::one() << (2 * k));
    let r = scaled.floor().to_integer().sqrt();
    Rat::new(r, BigInt::one() << k)
}

/// `ceil(2^k sqrt(x)) / 2^k` for `x >= 0`.
fn sqrt_ceil_dyadic(x: &Rat, k: u32) -> Rat {
    let scaled = x * Rat::from_integer(BigInt::one() << (2 * k));
    let mut r = scaled.floor().to_integer().sqrt();
    if Rat::from_integer(&r * &r) != scaled {
        r += 1;
    }
    Rat::new(r, BigInt::one() << k)
}

/// Certified enclosure of `(1 + |b| + |w|) / min(1, dist)`, where `dist` is
/// the distance from the ray above `p` to the closed region below the
/// parabola `x^2/2 + D`.
///
/// Successive calls with smaller `precision` return nested intervals.
pub fn support_constant(p: &TiltPoint, lp: &LePotierBound, precision: &Rat) -> Result<(Rat, Rat)> {
    require_region(p, lp)?;
    if !precision.is_positive() {
        return Err(TiltError::pre("precision must be positive"));
    }
    let numer = Rat::one() + p.b.abs() + p.w.abs();
    // The region is closed downward, so the nearest point to the ray is the
    // nearest point to p itself, and it lies on the parabola. Squared
    // distance: f(x) = (x - b)^2 + (x^2/2 + D - w)^2.
    let c = lp.defect() - &p.w;
    let f = Poly::new(vec![
        &p.b * &p.b + &c * &c,
        int(-2) * &p.b,
        Rat::one() + &c,
        Rat::zero(),
        Rat::new(1.into(), 4.into()),
    ]);
    // f'/2 = x^3/2 + (D - w + 1) x - b
    let crit = Poly::new(vec![-p.b.clone(), &c + Rat::one(), Rat::zero(), half()]);
    let roots = crit.real_roots();
    let mut k: u32 = 1;
    loop {
        let step = Rat::new(BigInt::one(), BigInt::one() << k);
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for r in &roots {
            let iv = crit.refine(r, &step);
            let (a, b) = f.eval_interval(&iv.lo, &iv.hi);
            lo = Some(lo.map_or(a.clone(), |x| min_rat(&x, &a)));
            hi = Some(hi.map_or(b.clone(), |x| min_rat(&x, &b)));
        }
        let m_lo = lo.expect("a cubic has a real root").max(Rat::zero());
        let m_hi = hi.unwrap();
        let d_lo = sqrt_floor_dyadic(&m_lo, k);
        let d_hi = sqrt_ceil_dyadic(&m_hi, k);
        let one = Rat::one();
        if d_lo.is_positive() {
            let c_lo = &numer / min_rat(&one, &d_hi);
            let c_hi = &numer / min_rat(&one, &d_lo);
            if &c_hi - &c_lo <= *precision {
                return Ok((c_lo, c_hi));
            }
        }
        k += 1;
    }
}
