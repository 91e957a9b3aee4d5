//! The BMT-type cubic inequality in its three forms and the quadratic form
//! `Q_{b,w}`.

use num_traits::Signed;
use rayon::prelude::*;

use crate::charclass::CharVector;
use crate::error::{Result, TiltError};
use crate::geometry::Geometry;
use crate::quadratic::QuadraticNumber;
use crate::rational::{fmt_rat, int, sign, Rat};
use crate::tiltplane::{region_contains, LePotierBound, TiltPoint};

/// `Q_{b,w}(v)` from the expanded form, linear in `(b, w)`.
pub fn q_form(v: &CharVector, p: &TiltPoint, geom: &Geometry) -> Result<Rat> {
    let v3 = v.v3()?;
    let g1 = v.g1_or_default(geom);
    let xi = geom.xi();
    let (v0, v1, v2) = (&v.v0, &v.v1, &v.v2);
    let three = int(3);
    let w_part = v1 * v1 - int(2) * v0 * v2 + &three * &xi * v0 * v0;
    let b_part = &three * v0 * v3 - v1 * v2 - &three * v0 * &g1;
    let rest = int(2) * v2 * v2 - &three * v1 * v3 - &three * &xi * v0 * v2 + &three * v1 * &g1;
    Ok(int(2) * (&p.w * w_part + &p.b * b_part + rest))
}

/// `Q_{b,w}(v)` evaluated through the twisted components `v^b`.
pub fn q_form_twisted(v: &CharVector, p: &TiltPoint, geom: &Geometry) -> Result<Rat> {
    v.v3()?;
    let g1 = v.g1_or_default(geom);
    let xi = geom.xi();
    let t = v.twisted_rat(&p.b);
    let s = int(2) * &p.w - &p.b * &p.b;
    let three = int(3);
    Ok(&s * (v.discriminant() + &three * &xi * &v.v0 * &v.v0)
        + int(2) * &t[2] * (int(2) * &t[2] - &three * &xi * &v.v0)
        - int(6) * &t[1] * (&t[3] - &g1 + &p.b * &xi * &v.v0))
}

/// Right side minus left side of the cubic inequality at `(b, w)`; a
/// non-negative margin means the inequality holds.
pub fn conj1_check(v: &CharVector, p: &TiltPoint, geom: &Geometry) -> Result<Rat> {
    v.v3()?;
    let g1 = v.g1_or_default(geom);
    let t = v.twisted_rat(&p.b);
    let s = int(2) * &p.w - &p.b * &p.b;
    Ok(s / int(6) * &t[1] + g1 - &p.b * geom.xi() * &v.v0 - &t[3])
}

/// Margin of the inequality at `b = bbar(v)`, exact in `Q(sqrt(disc v))`.
pub fn conj3_margin(v: &CharVector, geom: &Geometry) -> Result<QuadraticNumber> {
    v.v3()?;
    let bb = v.bbar()?;
    let t = v.twisted(&bb)?;
    let g1 = QuadraticNumber::rational(v.g1_or_default(geom));
    let drift = bb.scale(&(geom.xi() * &v.v0));
    g1.sub(&drift)?.sub(&t[3])
}

/// Sign of [`conj3_margin`].
pub fn conj3_check(v: &CharVector, geom: &Geometry) -> Result<i32> {
    Ok(conj3_margin(v, geom)?.signum())
}

/// Rectangle and steps of a sampling grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub b_min: Rat,
    pub b_max: Rat,
    pub w_min: Rat,
    pub w_max: Rat,
    pub db: Rat,
    pub dw: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSample {
    pub b: Rat,
    pub w: Rat,
    pub q: Rat,
}

impl GridSample {
    pub fn sign(&self) -> i32 {
        sign(&self.q)
    }
}

fn steps(lo: &Rat, hi: &Rat, d: &Rat) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        out.push(x.clone());
        x += d;
    }
    out
}

/// Exact `Q` on every grid point, rows of increasing `w`, each row in
/// increasing `b`. Every grid point must lie in the region of `geom`.
pub fn q_region_sample(v: &CharVector, geom: &Geometry, grid: &Grid) -> Result<Vec<GridSample>> {
    if !grid.db.is_positive() || !grid.dw.is_positive() {
        return Err(TiltError::pre("grid steps must be positive"));
    }
    if grid.b_min > grid.b_max || grid.w_min > grid.w_max {
        return Err(TiltError::pre("grid rectangle is inverted"));
    }
    v.v3()?;
    let lp = LePotierBound::new(geom.bg_defect.clone())?;
    let bs = steps(&grid.b_min, &grid.b_max, &grid.db);
    let ws = steps(&grid.w_min, &grid.w_max, &grid.dw);
    for w in &ws {
        for b in &bs {
            if !region_contains(&TiltPoint::new(b.clone(), w.clone()), &lp) {
                return Err(TiltError::OutsideRegion {
                    b: fmt_rat(b),
                    w: fmt_rat(w),
                    defect: fmt_rat(lp.defect()),
                });
            }
        }
    }
    let rows: Vec<Vec<GridSample>> = ws
        .par_iter()
        .map(|w| {
            bs.iter()
                .map(|b| {
                    let q = q_form(v, &TiltPoint::new(b.clone(), w.clone()), geom)?;
                    Ok(GridSample { b: b.clone(), w: w.clone(), q })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// CSV with header `b,w,sign,q_num,q_den`.
pub fn grid_csv(samples: &[GridSample]) -> String {
    let mut s = String::from("b,w,sign,q_num,q_den\n");
    for g in samples {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_rat(&g.b),
            fmt_rat(&g.w),
            g.sign(),
            g.q.numer(),
            g.q.denom()
        ));
    }
    s
}
