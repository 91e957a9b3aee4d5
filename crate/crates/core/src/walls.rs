//! Numerical walls: lines in the `(b, w)` plane along which a lattice class
//! `u` and the class `v` have equal tilt slope.
//!
//! [`walls_through_point`] and [`walls_in_band`] enumerate candidates from an
//! exact finite box derived from the discriminant constraints;
//! [`bruteforce_walls`] and [`bruteforce_band`] scan an explicit box and test
//! every predicate literally, and serve as independent oracles.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::charclass::{CharVector, Slope};
use crate::error::{Result, TiltError};
use crate::geometry::Geometry;
use crate::quadratic::QuadraticNumber;
use crate::rational::{
    ceil_int, denom_lcm, floor_int, fmt_rat, int, lattice_points, max_rat, min_rat, on_step,
    sign, sqrt_bounds, Rat,
};
use crate::tiltplane::{nu_slope, require_region, LePotierBound, TiltPoint};

/// The line `A + B b + C w = 0` with coprime integer coefficients, plus the
/// classes that produce it.
///
/// Sign convention: the first non-zero entry of `(C, B, A)` is positive, so
/// non-vertical walls read `w = slope * b + intercept` with `C > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub line: [BigInt; 3],
    pub witnesses: Vec<CharVector>,
    /// More witnesses existed than the configured cap.
    pub overflow: bool,
}

impl Wall {
    pub fn slope(&self) -> Slope {
        let [_, b, c] = &self.line;
        Slope::ratio(-Rat::from_integer(b.clone()), &Rat::from_integer(c.clone()))
    }

    /// `A + B b + C w`.
    pub fn eval(&self, p: &TiltPoint) -> Rat {
        let [a, b, c] = &self.line;
        Rat::from_integer(a.clone())
            + Rat::from_integer(b.clone()) * &p.b
            + Rat::from_integer(c.clone()) * &p.w
    }

    pub fn contains(&self, p: &TiltPoint) -> bool {
        self.eval(p).is_zero()
    }

    /// Two rational points on the line where neither `v` nor the first
    /// witness has vanishing imaginary part, if such points exist.
    fn sample_points(&self, v: &CharVector, u: &CharVector) -> Vec<TiltPoint> {
        let [a, b, c] = self.line.clone().map(Rat::from_integer);
        let mut out = Vec::new();
        if c.is_zero() && b.is_zero() {
            return out;
        }
        for k in 0..8i64 {
            let p = if c.is_zero() {
                TiltPoint::new(-&a / &b, int(k))
            } else {
                let bb = int(k);
                let w = -(&a + &b * &bb) / &c;
                TiltPoint::new(bb, w)
            };
            if !v.v1_at(&p.b).is_zero() && !u.v1_at(&p.b).is_zero() {
                out.push(p);
            }
            if out.len() == 2 {
                break;
            }
        }
        out
    }

    /// Check that every witness has the same tilt slope as `v` at two sample
    /// points of the line.
    pub fn verify(&self, v: &CharVector) -> Result<()> {
        if self.line.iter().all(|x| x.is_zero()) {
            return Err(TiltError::Invariant("wall line is identically zero".into()));
        }
        for u in &self.witnesses {
            for p in self.sample_points(v, u) {
                if nu_slope(u, &p) != nu_slope(v, &p) {
                    return Err(TiltError::Invariant(format!(
                        "witness {u} does not share the slope of {v} at ({}, {})",
                        fmt_rat(&p.b),
                        fmt_rat(&p.w)
                    )));
                }
            }
        }
        Ok(())
    }

    fn order_key_cmp(&self, other: &Self) -> Ordering {
        self.slope()
            .cmp(&other.slope())
            .then_with(|| cmp_witnesses(&self.witnesses, &other.witnesses))
            .then_with(|| self.line.cmp(&other.line))
    }
}

fn cmp_witnesses(a: &[CharVector], b: &[CharVector]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.lex_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Clear denominators, divide by the gcd and fix the sign.
fn normalize_line(coeffs: [Rat; 3]) -> [BigInt; 3] {
    let den = denom_lcm(coeffs.iter());
    let ints = coeffs.map(|c| (c * Rat::from_integer(den.clone())).to_integer());
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let mut out = ints.map(|x| if g.is_zero() { x } else { x / &g });
    let lead = [&out[2], &out[1], &out[0]]
        .into_iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if lead {
        for x in out.iter_mut() {
            *x = -x.clone();
        }
    }
    out
}

fn line_coeffs(v: &CharVector, u: &CharVector) -> [Rat; 3] {
    [
        &v.v2 * &u.v1 - &v.v1 * &u.v2,
        &v.v0 * &u.v2 - &v.v2 * &u.v0,
        &u.v0 * &v.v1 - &v.v0 * &u.v1,
    ]
}

/// The numerical wall of `u` inside `v`.
pub fn wall_line(v: &CharVector, u: &CharVector) -> Result<Wall> {
    let coeffs = line_coeffs(v, u);
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(TiltError::Proportional);
    }
    Ok(Wall {
        line: normalize_line(coeffs),
        witnesses: vec![u.truncated()],
        overflow: false,
    })
}

/// Tunables for wall enumeration.
#[derive(Clone, Debug)]
pub struct WallConfig {
    /// Maximum number of witnesses kept per wall.
    pub witness_cap: usize,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for WallConfig {
    fn default() -> Self {
        Self { witness_cap: 64, threads: None }
    }
}

impl WallConfig {
    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| TiltError::Invariant(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }
}

/// Result of an enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallReport {
    pub walls: Vec<Wall>,
    /// Produced with a positive defect: the discriminant cap is not applied
    /// and completeness is not guaranteed.
    pub relaxed: bool,
}

/// Integer multiplier ranges `lo[i] ..= hi[i]`; the scanned classes are
/// `(k0 d0, k1 d1, k2 d2)` for lattice steps `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteBox {
    pub lo: [BigInt; 3],
    pub hi: [BigInt; 3],
}

impl BruteBox {
    pub fn is_empty(&self) -> bool {
        (0..3).any(|i| self.lo[i] > self.hi[i])
    }

    /// Number of lattice points.
    pub fn size(&self) -> BigInt {
        if self.is_empty() {
            return BigInt::zero();
        }
        (0..3).fold(BigInt::one(), |acc, i| acc * (&self.hi[i] - &self.lo[i] + 1))
    }

    pub fn covers(&self, other: &BruteBox) -> bool {
        other.is_empty() || (0..3).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    fn from_bounds(bounds: [(Rat, Rat); 3], steps: &[Rat]) -> Self {
        let lo = [0, 1, 2].map(|i| ceil_int(&(&bounds[i].0 / &steps[i])));
        let hi = [0, 1, 2].map(|i| floor_int(&(&bounds[i].1 / &steps[i])));
        Self { lo, hi }
    }

    fn empty() -> Self {
        Self {
            lo: [BigInt::one(), BigInt::one(), BigInt::one()],
            hi: [BigInt::zero(), BigInt::zero(), BigInt::zero()],
        }
    }
}

/// Discriminant with the defect correction: `disc(u) + 2 D u0^2`.
fn bg_ok(u: &CharVector, lp: &LePotierBound) -> bool {
    let corr = int(2) * lp.defect() * &u.v0 * &u.v0;
    (u.discriminant() + corr) >= Rat::zero()
}

/// Predicates (iii), (iv), (v) and non-proportionality.
fn admissible(v: &CharVector, u: &CharVector, geom: &Geometry, lp: &LePotierBound) -> bool {
    if v.proportional(u) {
        return false;
    }
    let q = v.sub(u);
    if !bg_ok(u, lp) || !bg_ok(&q, lp) {
        return false;
    }
    if lp.defect().is_zero() && u.discriminant() + q.discriminant() > v.discriminant() {
        return false;
    }
    u.is_on_lattice(geom)
}

fn check_class(v: &CharVector, geom: &Geometry) -> Result<CharVector> {
    let v = v.truncated();
    if v.v0.is_zero() && v.v1.is_zero() {
        return Err(TiltError::pre("class with v0 = v1 = 0 has no walls"));
    }
    if v.discriminant().is_negative() {
        return Err(TiltError::pre(format!(
            "discriminant {} is negative",
            fmt_rat(&v.discriminant())
        )));
    }
    v.check_lattice(geom)?;
    Ok(v)
}

/// `x * [(-m - r)/s, (-m + r)/s]` over `0 < x < big_x` is contained in the
/// returned closed interval, where `r = sqrt(m^2 + s)`.
fn rank_bounds(big_x: &Rat, m: &Rat, s: &Rat) -> (Rat, Rat) {
    let (_, r_hi) = sqrt_bounds(&(m * m + s), &Rat::one());
    let lo = big_x * (-m - &r_hi) / s;
    let hi = big_x * (-m + &r_hi) / s;
    (min_rat(&lo, &Rat::zero()), max_rat(&hi, &Rat::zero()))
}

enum Shape {
    /// `v1^b < 0`: no class satisfies the rank condition.
    Empty,
    /// `v1^b = 0`.
    Vertical,
    /// `v1^b > 0`, with `nu_0 = nu_{b,w}(v)` and the positive quantity
    /// `s = 2w - b^2 - 2D`.
    Sloped { big_x: Rat, nu0: Rat, s: Rat },
}

fn shape(v: &CharVector, p: &TiltPoint, lp: &LePotierBound) -> Shape {
    let big_x = v.v1_at(&p.b);
    match sign(&big_x) {
        -1 => Shape::Empty,
        0 => Shape::Vertical,
        _ => {
            let nu0 = (&v.v2 - &p.w * &v.v0) / &big_x;
            let s = int(2) * &p.w - &p.b * &p.b - int(2) * lp.defect();
            Shape::Sloped { big_x, nu0, s }
        }
    }
}

/// Bounds of the vertical-case box (standard bound only): `u0` between 0 and
/// `v0`, twisted `u2` between `v2^b` and 0.
fn vertical_bounds(v: &CharVector, b: &Rat) -> [(Rat, Rat); 3] {
    let zero = Rat::zero();
    let big_v = &v.v2 - b * &v.v1 + b * b / int(2) * &v.v0;
    let u0 = (min_rat(&zero, &v.v0), max_rat(&zero, &v.v0));
    let u1 = (min_rat(&zero, &(b * &v.v0)), max_rat(&zero, &(b * &v.v0)));
    let shift = b * b / int(2) * &v.v0;
    let u2 = (
        min_rat(&big_v, &zero) + min_rat(&zero, &shift),
        max_rat(&big_v, &zero) + max_rat(&zero, &shift),
    );
    [u0, u1, u2]
}

fn vertical_candidates(
    v: &CharVector,
    b: &Rat,
    geom: &Geometry,
    lp: &LePotierBound,
) -> Vec<CharVector> {
    let [r0, _, _] = vertical_bounds(v, b);
    let big_v = &v.v2 - b * &v.v1 + b * b / int(2) * &v.v0;
    let mut out = Vec::new();
    for u0 in lattice_points(&geom.lattice[0], &r0.0, &r0.1) {
        let u1 = b * &u0;
        if !on_step(&u1, &geom.lattice[1]) {
            continue;
        }
        let shift = b * b / int(2) * &u0;
        let lo = min_rat(&big_v, &Rat::zero()) + &shift;
        let hi = max_rat(&big_v, &Rat::zero()) + &shift;
        for u2 in lattice_points(&geom.lattice[2], &lo, &hi) {
            let u = CharVector::new(u0.clone(), u1.clone(), u2);
            if admissible(v, &u, geom, lp) {
                out.push(u);
            }
        }
    }
    out
}

fn merge(pairs: Vec<CharVector>, v: &CharVector, cap: usize) -> Result<Vec<Wall>> {
    let mut groups: BTreeMap<[BigInt; 3], Vec<CharVector>> = BTreeMap::new();
    for u in pairs {
        let w = wall_line(v, &u)?;
        groups.entry(w.line).or_default().push(u);
    }
    let mut walls: Vec<Wall> = groups
        .into_iter()
        .map(|(line, mut ws)| {
            ws.sort_by(|a, b| a.lex_cmp(b));
            ws.dedup();
            let overflow = ws.len() > cap;
            ws.truncate(cap);
            Wall { line, witnesses: ws, overflow }
        })
        .collect();
    walls.sort_by(|a, b| a.order_key_cmp(b));
    Ok(walls)
}

/// All candidate walls for `v` passing through `p`.
///
/// With the standard bound (defect 0) the list is complete for the lattice
/// of `geom`. With a positive defect the discriminant cap is dropped, BG is
/// relaxed to `disc + 2 D u0^2 >= 0`, and the report is flagged `relaxed`.
pub fn walls_through_point(
    v: &CharVector,
    p: &TiltPoint,
    geom: &Geometry,
    lp: &LePotierBound,
    cfg: &WallConfig,
) -> Result<WallReport> {
    require_region(p, lp)?;
    let v = check_class(v, geom)?;
    let relaxed = lp.defect().is_positive();
    let candidates = match shape(&v, p, lp) {
        Shape::Empty => Vec::new(),
        Shape::Vertical => {
            if relaxed {
                return Err(TiltError::BoxTooSmall(
                    "the relaxed vertical case has no finite box; scan an explicit box".into(),
                ));
            }
            vertical_candidates(&v, &p.b, geom, lp)
        }
        Shape::Sloped { big_x, nu0, s } => {
            let m = &nu0 - &p.b;
            let (lo, hi) = rank_bounds(&big_x, &m, &s);
            let u0s = lattice_points(&geom.lattice[0], &lo, &hi);
            cfg.run(|| {
                u0s.par_iter()
                    .flat_map_iter(|u0| {
                        let base = &p.b * u0;
                        let top = &base + &big_x;
                        lattice_points(&geom.lattice[1], &base, &top)
                            .into_iter()
                            .filter(|u1| *u1 != base && *u1 != top)
                            .filter_map(|u1| {
                                let x = &u1 - &base;
                                let u2 = &p.w * u0 + &nu0 * &x;
                                let u = CharVector::new(u0.clone(), u1, u2);
                                admissible(&v, &u, geom, lp).then_some(u)
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })?
        }
    };
    Ok(WallReport { walls: merge(candidates, &v, cfg.witness_cap)?, relaxed })
}

/// Box guaranteed to contain every witness found by [`walls_through_point`];
/// `None` in the relaxed vertical case where no finite box exists.
pub fn certified_box(
    v: &CharVector,
    p: &TiltPoint,
    geom: &Geometry,
    lp: &LePotierBound,
) -> Result<Option<BruteBox>> {
    require_region(p, lp)?;
    let v = check_class(v, geom)?;
    let steps = &geom.lattice[..3];
    Ok(match shape(&v, p, lp) {
        Shape::Empty => Some(BruteBox::empty()),
        Shape::Vertical if lp.defect().is_positive() => None,
        Shape::Vertical => Some(BruteBox::from_bounds(vertical_bounds(&v, &p.b), steps)),
        Shape::Sloped { big_x, nu0, s } => {
            let m = &nu0 - &p.b;
            let (lo, hi) = rank_bounds(&big_x, &m, &s);
            let r = max_rat(&lo.abs(), &hi.abs());
            let u1 = (-p.b.abs() * &r, p.b.abs() * &r + &big_x);
            let u2r = p.w.abs() * &r + nu0.abs() * &big_x;
            Some(BruteBox::from_bounds([(lo, hi), u1, (-u2r.clone(), u2r)], steps))
        }
    })
}

fn scan_box<F>(bx: &BruteBox, geom: &Geometry, cfg: &WallConfig, keep: F) -> Result<Vec<CharVector>>
where
    F: Fn(&CharVector) -> bool + Sync,
{
    if bx.is_empty() {
        return Ok(Vec::new());
    }
    let step = |i: usize, k: &BigInt| Rat::from_integer(k.clone()) * &geom.lattice[i];
    let mut k0s = Vec::new();
    let mut k = bx.lo[0].clone();
    while k <= bx.hi[0] {
        k0s.push(k.clone());
        k += 1;
    }
    cfg.run(|| {
        k0s.par_iter()
            .flat_map_iter(|k0| {
                let mut out = Vec::new();
                let mut k1 = bx.lo[1].clone();
                while k1 <= bx.hi[1] {
                    let mut k2 = bx.lo[2].clone();
                    while k2 <= bx.hi[2] {
                        let u = CharVector::new(step(0, k0), step(1, &k1), step(2, &k2));
                        if keep(&u) {
                            out.push(u);
                        }
                        k2 += 1;
                    }
                    k1 += 1;
                }
                out
            })
            .collect()
    })
}

/// Literal rank and slope predicates (i), (ii) at `p`.
fn rank_and_slope_ok(v: &CharVector, u: &CharVector, p: &TiltPoint) -> bool {
    let big_x = v.v1_at(&p.b);
    let x = u.v1_at(&p.b);
    if big_x.is_zero() {
        // vertical case: the rank condition is replaced by u1 = b u0
        x.is_zero()
    } else {
        x.is_positive() && x < big_x && nu_slope(u, p) == nu_slope(v, p)
    }
}

/// Exhaustive scan of `bx` applying every predicate literally.
///
/// Fails with [`TiltError::BoxTooSmall`] when `bx` does not cover the
/// certified box; in the relaxed vertical case any box is accepted.
pub fn bruteforce_walls(
    v: &CharVector,
    p: &TiltPoint,
    geom: &Geometry,
    lp: &LePotierBound,
    bx: &BruteBox,
    cfg: &WallConfig,
) -> Result<WallReport> {
    if let Some(cert) = certified_box(v, p, geom, lp)? {
        if !bx.covers(&cert) {
            return Err(TiltError::BoxTooSmall(format!(
                "need multipliers {:?}..={:?}",
                cert.lo, cert.hi
            )));
        }
    }
    let v = check_class(v, geom)?;
    let hits = scan_box(bx, geom, cfg, |u| {
        rank_and_slope_ok(&v, u, p) && admissible(&v, u, geom, lp)
    })?;
    Ok(WallReport {
        walls: merge(hits, &v, cfg.witness_cap)?,
        relaxed: lp.defect().is_positive(),
    })
}

struct Band {
    b0: Rat,
    w_lo: Rat,
    w_hi: Rat,
}

fn check_band(b0: &Rat, w_lo: &Rat, w_hi: &Rat, lp: &LePotierBound) -> Result<Band> {
    if w_lo >= w_hi {
        return Err(TiltError::pre("band needs w_lo < w_hi"));
    }
    // The open lower end must stay strictly inside the region: the
    // enumeration box grows without bound as w_lo approaches the parabola.
    require_region(&TiltPoint::new(b0.clone(), w_lo.clone()), lp)?;
    Ok(Band { b0: b0.clone(), w_lo: w_lo.clone(), w_hi: w_hi.clone() })
}

struct BandSetup {
    big_x: Rat,
    u0_lo: Rat,
    u0_hi: Rat,
}

fn band_setup(v: &CharVector, band: &Band, lp: &LePotierBound) -> BandSetup {
    let big_x = v.v1_at(&band.b0);
    let s_of = |w: &Rat| int(2) * w - &band.b0 * &band.b0 - int(2) * lp.defect();
    let m_of = |w: &Rat| (&v.v2 - w * &v.v0) / &big_x - &band.b0;
    let big_m = max_rat(&m_of(&band.w_lo).abs(), &m_of(&band.w_hi).abs());
    let s_lo = s_of(&band.w_lo);
    let s_hi = s_of(&band.w_hi);
    let (_, r_hi) = sqrt_bounds(&(&big_m * &big_m + &s_hi), &Rat::one());
    let r = &big_x * (big_m + r_hi) / s_lo;
    BandSetup { big_x, u0_lo: -r.clone(), u0_hi: r }
}

/// All candidate walls crossing the vertical segment `{b0} x (w_lo, w_hi]`.
///
/// The lower end `(b0, w_lo)` must itself lie in the open region.
pub fn walls_in_band(
    v: &CharVector,
    b0: &Rat,
    w_lo: &Rat,
    w_hi: &Rat,
    geom: &Geometry,
    lp: &LePotierBound,
    cfg: &WallConfig,
) -> Result<WallReport> {
    let band = check_band(b0, w_lo, w_hi, lp)?;
    let v = check_class(v, geom)?;
    let relaxed = lp.defect().is_positive();
    let top = TiltPoint::new(band.b0.clone(), band.w_hi.clone());
    let candidates = match shape(&v, &top, lp) {
        Shape::Empty => Vec::new(),
        Shape::Vertical => {
            if relaxed {
                return Err(TiltError::BoxTooSmall(
                    "the relaxed vertical case has no finite box; scan an explicit box".into(),
                ));
            }
            vertical_candidates(&v, &band.b0, geom, lp)
        }
        Shape::Sloped { .. } => {
            let st = band_setup(&v, &band, lp);
            let u0s = lattice_points(&geom.lattice[0], &st.u0_lo, &st.u0_hi);
            let big_x = &st.big_x;
            cfg.run(|| {
                u0s.par_iter()
                    .flat_map_iter(|u0| {
                        let mut out = Vec::new();
                        let base = &band.b0 * u0;
                        let top = &base + big_x;
                        for u1 in lattice_points(&geom.lattice[1], &base, &top) {
                            if u1 == base || u1 == top {
                                continue;
                            }
                            let x = &u1 - &base;
                            // u2 solving the slope equation is affine in w
                            let slope = u0 - &x * &v.v0 / big_x;
                            let icpt = &x * &v.v2 / big_x;
                            let e_lo = &band.w_lo * &slope + &icpt;
                            let e_hi = &band.w_hi * &slope + &icpt;
                            let den = big_x * u0 - &x * &v.v0;
                            if den.is_zero() {
                                continue;
                            }
                            let (lo, hi) = (min_rat(&e_lo, &e_hi), max_rat(&e_lo, &e_hi));
                            for u2 in lattice_points(&geom.lattice[2], &lo, &hi) {
                                let w_star = (big_x * &u2 - &x * &v.v2) / &den;
                                if w_star <= band.w_lo || w_star > band.w_hi {
                                    continue;
                                }
                                let u = CharVector::new(u0.clone(), u1.clone(), u2);
                                if admissible(&v, &u, geom, lp) {
                                    out.push(u);
                                }
                            }
                        }
                        out
                    })
                    .collect::<Vec<_>>()
            })?
        }
    };
    Ok(WallReport { walls: merge(candidates, &v, cfg.witness_cap)?, relaxed })
}

/// Box covering every witness of [`walls_in_band`].
pub fn certified_band_box(
    v: &CharVector,
    b0: &Rat,
    w_lo: &Rat,
    w_hi: &Rat,
    geom: &Geometry,
    lp: &LePotierBound,
) -> Result<Option<BruteBox>> {
    let band = check_band(b0, w_lo, w_hi, lp)?;
    let v = check_class(v, geom)?;
    let steps = &geom.lattice[..3];
    let top = TiltPoint::new(band.b0.clone(), band.w_hi.clone());
    Ok(match shape(&v, &top, lp) {
        Shape::Empty => Some(BruteBox::empty()),
        Shape::Vertical if lp.defect().is_positive() => None,
        Shape::Vertical => Some(BruteBox::from_bounds(vertical_bounds(&v, &band.b0), steps)),
        Shape::Sloped { .. } => {
            let st = band_setup(&v, &band, lp);
            let r = st.u0_hi.clone();
            let u1 = (-band.b0.abs() * &r, band.b0.abs() * &r + &st.big_x);
            let w_max = max_rat(&band.w_lo.abs(), &band.w_hi.abs());
            let reach = max_rat(
                &(&v.v2 - &band.w_lo * &v.v0).abs(),
                &(&v.v2 - &band.w_hi * &v.v0).abs(),
            );
            let u2r = w_max * &r + reach;
            Some(BruteBox::from_bounds(
                [(st.u0_lo.clone(), r), u1, (-u2r.clone(), u2r)],
                steps,
            ))
        }
    })
}

/// Exhaustive oracle for [`walls_in_band`]: a wall crosses the segment when
/// its affine equation, restricted to `b = b0`, vanishes at `w_hi` or changes
/// sign strictly between the endpoints.
pub fn bruteforce_band(
    v: &CharVector,
    b0: &Rat,
    w_lo: &Rat,
    w_hi: &Rat,
    geom: &Geometry,
    lp: &LePotierBound,
    bx: &BruteBox,
    cfg: &WallConfig,
) -> Result<WallReport> {
    if let Some(cert) = certified_band_box(v, b0, w_lo, w_hi, geom, lp)? {
        if !bx.covers(&cert) {
            return Err(TiltError::BoxTooSmall(format!(
                "need multipliers {:?}..={:?}",
                cert.lo, cert.hi
            )));
        }
    }
    let v = check_class(v, geom)?;
    let vertical = v.v1_at(b0).is_zero();
    let hits = scan_box(bx, geom, cfg, |u| {
        let x = u.v1_at(b0);
        if vertical {
            if !x.is_zero() {
                return false;
            }
        } else if !(x.is_positive() && x < v.v1_at(b0)) {
            return false;
        }
        let [a, b, c] = line_coeffs(&v, u);
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return false;
        }
        let f = |w: &Rat| &a + &b * b0 + &c * w;
        let (f_lo, f_hi) = (f(w_lo), f(w_hi));
        let crosses = if vertical {
            f_lo.is_zero() && f_hi.is_zero()
        } else {
            f_hi.is_zero() || (!f_lo.is_zero() && sign(&f_lo) != sign(&f_hi))
        };
        crosses && admissible(&v, u, geom, lp)
    })?;
    Ok(WallReport {
        walls: merge(hits, &v, cfg.witness_cap)?,
        relaxed: lp.defect().is_positive(),
    })
}

/// Outcome of [`is_pseudo_wall`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoWallVerdict {
    pub holds: bool,
    pub diagnostic: String,
}

impl PseudoWallVerdict {
    fn fail(msg: &str) -> Self {
        Self { holds: false, diagnostic: msg.into() }
    }
}

/// Numerical necessary conditions for `u` to destabilize `v` along their
/// common wall somewhere in the region.
pub fn is_pseudo_wall(
    v: &CharVector,
    u: &CharVector,
    geom: &Geometry,
    lp: &LePotierBound,
) -> PseudoWallVerdict {
    let v = v.truncated();
    let u = u.truncated();
    if v.proportional(&u) {
        return PseudoWallVerdict::fail("proportional");
    }
    let q = v.sub(&u);
    if !bg_ok(&u, lp) {
        return PseudoWallVerdict::fail("BG violated");
    }
    if !bg_ok(&q, lp) {
        return PseudoWallVerdict::fail("BG violated by quotient");
    }
    if lp.defect().is_zero() && u.discriminant() + q.discriminant() > v.discriminant() {
        return PseudoWallVerdict::fail("discriminant cap exceeded");
    }
    if !u.is_on_lattice(geom) {
        return PseudoWallVerdict::fail("off lattice");
    }
    let [a, b, c] = line_coeffs(&v, &u);
    if c.is_zero() && b.is_zero() {
        return PseudoWallVerdict::fail("wall misses the region");
    }
    if c.is_zero() {
        // vertical line b = -A/B
        let b_star = -&a / &b;
        let x = u.v1_at(&b_star);
        let big_x = v.v1_at(&b_star);
        let ok = if big_x.is_zero() {
            x.is_zero()
        } else {
            x.is_positive() && x < big_x
        };
        return if ok {
            PseudoWallVerdict { holds: true, diagnostic: "ok".into() }
        } else {
            PseudoWallVerdict::fail("rank condition fails on the wall")
        };
    }
    // w = alpha b + beta meets the region for b strictly between
    // alpha -/+ sqrt(alpha^2 + 2 beta - 2 D)
    let alpha = -&b / &c;
    let beta = -&a / &c;
    let rad = &alpha * &alpha + int(2) * &beta - int(2) * lp.defect();
    if !rad.is_positive() {
        return PseudoWallVerdict::fail("wall misses the region");
    }
    let sq = QuadraticNumber::sqrt(rad).expect("positive radicand");
    let mut lo = QuadraticNumber::rational(alpha.clone()).sub(&sq).expect("same field");
    let mut hi = QuadraticNumber::rational(alpha).add(&sq).expect("same field");
    // rank condition 0 < u1 - b u0 < v1 - b v0 as linear constraints in b
    let mut tighten = |coef: &Rat, rhs: &Rat| -> bool {
        // coef * b < rhs
        match sign(coef) {
            0 => rhs.is_positive(),
            1 => {
                let cand = QuadraticNumber::rational(rhs / coef);
                if cand.try_cmp(&hi).expect("same field") == Ordering::Less {
                    hi = cand;
                }
                true
            }
            _ => {
                let cand = QuadraticNumber::rational(rhs / coef);
                if cand.try_cmp(&lo).expect("same field") == Ordering::Greater {
                    lo = cand;
                }
                true
            }
        }
    };
    // u1 - b u0 > 0  <=>  u0 b < u1
    let ok1 = tighten(&u.v0, &u.v1);
    // (v1 - u1) - b (v0 - u0) > 0
    let ok2 = tighten(&q.v0, &q.v1);
    if !(ok1 && ok2) || lo.try_cmp(&hi).expect("same field") != Ordering::Less {
        return PseudoWallVerdict::fail("rank condition fails on the wall inside the region");
    }
    PseudoWallVerdict { holds: true, diagnostic: "ok".into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fano_preset;
    use crate::rational::rat;

    fn unit_geom() -> Geometry {
        Geometry {
            bg_defect: Rat::zero(),
            chi_o: Rat::one(),
            dim: 3,
            gamma_dot_h: Rat::zero(),
            h_top: Rat::one(),
            k_coeff: int(-4),
            lattice: [int(1), int(1), rat(1, 2), rat(1, 6)],
            name: "unit".into(),
            td2_dot_h: rat(11, 6),
        }
    }

    fn cv(a: i64, b: i64, c: Rat) -> CharVector {
        CharVector::new(int(a), int(b), c)
    }

    #[test]
    fn wall_line_examples() {
        let w = wall_line(&cv(2, 2, int(1)), &cv(1, 0, int(0))).unwrap();
        assert_eq!(w.line, [0, -1, 2].map(BigInt::from));
        assert!(w.contains(&TiltPoint::new(int(1), rat(1, 2))));
        let w = wall_line(&cv(0, 1, int(0)), &cv(1, 0, int(0))).unwrap();
        assert_eq!(w.line, [0, 0, 1].map(BigInt::from));
        assert_eq!(w.slope(), Slope::Finite(int(0)));
        let v = cv(2, 2, int(1));
        assert_eq!(wall_line(&v, &v.scale(&int(2))), Err(TiltError::Proportional));
    }

    #[test]
    fn mukai_class_has_no_walls() {
        let g = fano_preset(1, int(14)).unwrap();
        let v = cv(28, 14, int(2));
        let lp = LePotierBound::standard();
        for w in [rat(1, 4), int(1), int(4)] {
            let p = TiltPoint::new(int(0), w);
            let r = walls_through_point(&v, &p, &g, &lp, &WallConfig::default()).unwrap();
            assert!(r.walls.is_empty());
        }
    }

    #[test]
    fn zero_discriminant_is_wall_free() {
        let g = unit_geom();
        let v = cv(2, 2, int(1));
        let lp = LePotierBound::standard();
        let p = TiltPoint::new(int(0), int(1));
        let r = walls_through_point(&v, &p, &g, &lp, &WallConfig::default()).unwrap();
        assert!(r.walls.is_empty());
    }

    #[test]
    fn ideal_sheaf_of_points() {
        // rank one, c1 = 0, ch2 = -2: destabilized by O(-1) at some point
        let g = unit_geom();
        let v = cv(1, 0, int(-2));
        let lp = LePotierBound::standard();
        // the O(-1) wall w = -5/2 b - 2 meets b = -3/2 at w = 7/4
        let p = TiltPoint::new(rat(-3, 2), rat(7, 4));
        let cfg = WallConfig::default();
        let r = walls_through_point(&v, &p, &g, &lp, &cfg).unwrap();
        assert_eq!(r.walls.len(), 1);
        let wall = &r.walls[0];
        assert_eq!(wall.line, [4, 5, 2].map(BigInt::from));
        assert!(wall.witnesses.contains(&cv(1, -1, rat(1, 2))));
        wall.verify(&v).unwrap();
        assert!(wall.contains(&p));
        assert!(wall.contains(&TiltPoint::new(int(0), int(-2))));
        for u in &wall.witnesses {
            assert!(is_pseudo_wall(&v, u, &g, &lp).holds);
            assert!(wall.witnesses.contains(&v.sub(u)));
        }
        let bx = certified_box(&v, &p, &g, &lp).unwrap().unwrap();
        let brute = bruteforce_walls(&v, &p, &g, &lp, &bx, &cfg).unwrap();
        assert_eq!(brute, r);
    }

    #[test]
    fn box_too_small_is_rejected() {
        let g = unit_geom();
        let v = cv(1, 0, int(-2));
        let lp = LePotierBound::standard();
        let p = TiltPoint::new(rat(-3, 2), rat(7, 4));
        let bx = BruteBox { lo: [0, 0, 0].map(BigInt::from), hi: [0, 0, 0].map(BigInt::from) };
        assert!(matches!(
            bruteforce_walls(&v, &p, &g, &lp, &bx, &WallConfig::default()),
            Err(TiltError::BoxTooSmall(_))
        ));
    }

    #[test]
    fn vertical_case_matches_oracle() {
        let g = unit_geom();
        let v = cv(2, 0, int(-3));
        let lp = LePotierBound::standard();
        let p = TiltPoint::new(int(0), int(1));
        let cfg = WallConfig::default();
        let r = walls_through_point(&v, &p, &g, &lp, &cfg).unwrap();
        let bx = certified_box(&v, &p, &g, &lp).unwrap().unwrap();
        assert_eq!(bruteforce_walls(&v, &p, &g, &lp, &bx, &cfg).unwrap(), r);
        for wall in &r.walls {
            assert_eq!(wall.slope(), Slope::Infinite);
            for u in &wall.witnesses {
                assert!(is_pseudo_wall(&v, u, &g, &lp).holds);
            }
        }
    }

    #[test]
    fn band_matches_oracle() {
        let g = unit_geom();
        let v = cv(1, 0, int(-2));
        let lp = LePotierBound::standard();
        let cfg = WallConfig::default();
        let (b0, lo, hi) = (rat(-3, 2), rat(3, 2), int(2));
        let r = walls_in_band(&v, &b0, &lo, &hi, &g, &lp, &cfg).unwrap();
        assert!(!r.walls.is_empty());
        let bx = certified_band_box(&v, &b0, &lo, &hi, &g, &lp).unwrap().unwrap();
        assert_eq!(bruteforce_band(&v, &b0, &lo, &hi, &g, &lp, &bx, &cfg).unwrap(), r);
        let far = walls_in_band(&v, &b0, &int(1000), &int(1001), &g, &lp, &cfg).unwrap();
        assert!(far.walls.is_empty());
    }

    #[test]
    fn pseudo_wall_diagnostics() {
        let g = unit_geom();
        let lp = LePotierBound::standard();
        let v = cv(1, 0, int(-2));
        let verdict = is_pseudo_wall(&v, &v.scale(&int(2)), &g, &lp);
        assert_eq!(verdict.diagnostic, "proportional");
        let verdict = is_pseudo_wall(&v, &cv(1, 0, int(1)), &g, &lp);
        assert_eq!(verdict.diagnostic, "BG violated");
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let g = unit_geom();
        let v = cv(3, 1, int(-5));
        let lp = LePotierBound::standard();
        let p = TiltPoint::new(rat(-1, 2), int(3));
        let one = WallConfig { threads: Some(1), ..Default::default() };
        let four = WallConfig { threads: Some(4), ..Default::default() };
        assert_eq!(
            walls_through_point(&v, &p, &g, &lp, &one).unwrap(),
            walls_through_point(&v, &p, &g, &lp, &four).unwrap()
        );
    }
}
