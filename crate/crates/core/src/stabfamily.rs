//! Central charges `Z^{a,b}_{alpha,beta}` of the four-parameter family and
//! the support-property interval for the constant `K`.

use num_traits::{One, Signed, Zero};

use crate::charclass::CharVector;
use crate::error::{Result, TiltError};
use crate::geometry::Geometry;
use crate::poly::Poly;
use crate::rational::{int, rat, Rat};

/// `2^-20`.
pub fn default_precision() -> Rat {
    rat(1, 1 << 20)
}

fn require_a(a: &Rat) -> Result<()> {
    if a.is_positive() {
        Ok(())
    } else {
        Err(TiltError::pre("a must be positive"))
    }
}

/// `(re, im)` of the full central charge; `v3` is paired with `g1` as in the
/// lattice coordinate `v3 - g1`.
pub fn z_full(
    v: &CharVector,
    a: &Rat,
    b: &Rat,
    alpha: &Rat,
    beta: &Rat,
    geom: &Geometry,
) -> Result<(Rat, Rat)> {
    v.v3()?;
    let t = v.twisted_rat(b);
    let g1 = v.g1_or_default(geom);
    let re = -(&t[3] - g1) - b * geom.xi() * &v.v0 + beta * &t[2] + alpha * &t[1];
    let im = &t[2] - a * a / int(2) * &v.v0;
    Ok((re, im))
}

/// Membership in the parameter region: `a > 0`,
/// `alpha > a^2/6 + |beta| a / 2`, and `region(b, (a^2 + b^2)/2)`.
pub fn vr_contains<F>(a: &Rat, b: &Rat, alpha: &Rat, beta: &Rat, region: F) -> bool
where
    F: Fn(&Rat, &Rat) -> bool,
{
    a.is_positive()
        && alpha > &(a * a / int(6) + beta.abs() * a / int(2))
        && region(b, &((a * a + b * b) / int(2)))
}

/// Certified description of the open interval of admissible `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportInterval {
    Empty,
    /// `inner` is contained in the true interval, which is contained in
    /// `outer`; both endpoint enclosures have width at most the requested
    /// precision. When the endpoints are rational, `inner == outer`.
    Interval { inner: (Rat, Rat), outer: (Rat, Rat) },
}

impl SupportInterval {
    pub fn is_empty(&self) -> bool {
        matches!(self, SupportInterval::Empty)
    }
}

/// `det M(K) / a^2` for `M(K) = [[K - 6 alpha, -3/2 beta a^2], [-3/2 beta a^2, a^4 - K a^2]]`.
fn reduced_det(a: &Rat, alpha: &Rat, beta: &Rat) -> Poly {
    let a2 = a * a;
    let six_alpha = int(6) * alpha;
    Poly::new(vec![
        -(&six_alpha * &a2) - rat(9, 4) * beta * beta * &a2,
        &six_alpha + &a2,
        -Rat::one(),
    ])
}

/// Values of `K` for which `M(K)` is negative definite.
pub fn support_interval(a: &Rat, alpha: &Rat, beta: &Rat, precision: &Rat) -> Result<SupportInterval> {
    require_a(a)?;
    if !precision.is_positive() {
        return Err(TiltError::pre("precision must be positive"));
    }
    let det = reduced_det(a, alpha, beta);
    let roots = det.real_roots();
    // det(6 alpha) <= 0, so the root interval lies entirely on one side of
    // 6 alpha; the top-left entry K - 6 alpha is negative on it exactly when
    // the vertex (6 alpha + a^2)/2 is below 6 alpha.
    if roots.len() < 2 || a * a >= int(6) * alpha {
        return Ok(SupportInterval::Empty);
    }
    let lo = det.refine(&roots[0], precision);
    let hi = det.refine(&roots[1], precision);
    Ok(SupportInterval::Interval {
        inner: (lo.hi.clone(), hi.lo.clone()),
        outer: (lo.lo, hi.hi),
    })
}

/// `K disc(x) + nabla(x)` for `x = (x0, x1, x2, x3)`.
pub fn form_value(a: &Rat, b: &Rat, xi: &Rat, big_k: &Rat, x: &[Rat; 4]) -> Rat {
    let [x0, x1, x2, x3] = x;
    let disc = x1 * x1 - int(2) * x0 * x2;
    let nabla = int(3) * xi * a * a * x0 * x0 + int(2) * x2 * (int(2) * x2 - int(3) * xi * x0)
        - int(6) * x1 * (x3 + b * xi * x0);
    big_k * disc + nabla
}

/// Negative definiteness of `K disc + nabla` on the kernel of the central
/// charge, spanned by `(0, 1, 0, alpha)` and `(1, 0, a^2/2, beta a^2/2 - b xi)`.
pub fn negdef_check(a: &Rat, b: &Rat, alpha: &Rat, beta: &Rat, xi: &Rat, big_k: &Rat) -> Result<bool> {
    require_a(a)?;
    let a2 = a * a;
    let k1 = [Rat::zero(), Rat::one(), Rat::zero(), alpha.clone()];
    let k2 = [Rat::one(), Rat::zero(), &a2 / int(2), beta * &a2 / int(2) - b * xi];
    let f = |x: &[Rat; 4]| form_value(a, b, xi, big_k, x);
    let sum: [Rat; 4] = std::array::from_fn(|i| &k1[i] + &k2[i]);
    let g11 = f(&k1);
    let g22 = f(&k2);
    let g12 = (f(&sum) - &g11 - &g22) / int(2);
    Ok(g11.is_negative() && &g11 * &g22 - &g12 * &g12 > Rat::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charclass::CharVector;
    use crate::geometry::fano_preset;
    use crate::tiltplane::z_ab;
    use proptest::prelude::*;

    #[test]
    fn z_full_examples() {
        let mut g = fano_preset(4, int(1)).unwrap();
        g.h_top = int(3);
        let o = CharVector::new3(int(3), int(0), int(0), int(0));
        let (re, im) = z_full(&o, &int(1), &int(0), &int(2), &int(5), &g).unwrap();
        assert_eq!((re, im), (int(0), rat(-3, 2)));
        let v = CharVector::new3(int(2), int(-1), rat(1, 2), rat(1, 3));
        let (a, b) = (rat(3, 2), rat(-1, 3));
        let (_, im) = z_full(&v, &a, &b, &int(1), &int(1), &g).unwrap();
        assert_eq!(im, -z_ab(&v, &a, &b).unwrap().0);
    }

    #[test]
    fn region_examples() {
        let any = |_: &Rat, _: &Rat| true;
        assert!(vr_contains(&int(1), &int(0), &int(1), &int(0), any));
        assert!(!vr_contains(&int(1), &int(0), &rat(1, 6), &int(0), any));
        assert!(!vr_contains(&int(1), &int(0), &rat(1, 2), &int(2), any));
        assert!(!vr_contains(&int(0), &int(0), &int(9), &int(0), any));
    }

    #[test]
    fn interval_examples() {
        let eps = default_precision();
        let r = support_interval(&int(2), &int(3), &int(0), &eps).unwrap();
        assert_eq!(
            r,
            SupportInterval::Interval { inner: (int(4), int(18)), outer: (int(4), int(18)) }
        );
        // alpha = a^2/6 + |beta| a/2
        let r = support_interval(&int(2), &(rat(4, 6) + int(1)), &int(1), &eps).unwrap();
        assert!(r.is_empty());
        let r = support_interval(&int(1), &int(1), &int(1), &eps).unwrap();
        assert_eq!(
            r,
            SupportInterval::Interval { inner: (rat(3, 2), rat(11, 2)), outer: (rat(3, 2), rat(11, 2)) }
        );
        assert!(support_interval(&int(0), &int(1), &int(0), &eps).is_err());
    }

    #[test]
    fn negdef_examples() {
        let (a, alpha) = (int(1), int(1));
        let mid = (&a * &a + int(6) * &alpha) / int(2);
        assert!(negdef_check(&a, &int(0), &alpha, &int(0), &int(0), &mid).unwrap());
        assert!(!negdef_check(&a, &int(0), &alpha, &int(0), &int(0), &int(6)).unwrap());
        assert!(!negdef_check(&a, &int(0), &alpha, &int(0), &int(0), &int(7)).unwrap());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-30i64..30, 1i64..7).prop_map(|(n, d)| rat(n, d))
    }

    fn pos_rat() -> impl Strategy<Value = Rat> {
        (1i64..30, 1i64..7).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn nonempty_iff_alpha_large(a in pos_rat(), alpha in small_rat(), beta in small_rat()) {
            let r = support_interval(&a, &alpha, &beta, &default_precision()).unwrap();
            let crit = alpha > &a * &a / int(6) + beta.abs() * &a / int(2);
            prop_assert_eq!(!r.is_empty(), crit);
            let mirrored = support_interval(&a, &alpha, &-beta.clone(), &default_precision()).unwrap();
            prop_assert_eq!(r, mirrored);
        }

        #[test]
        fn re_matches_cubic_margin(
            c in proptest::collection::vec(small_rat(), 4), a in pos_rat(), b in small_rat()
        ) {
            let g = fano_preset(2, int(3)).unwrap();
            let v = CharVector::from_components(&c).unwrap();
            let w = (&a * &a + &b * &b) / int(2);
            let (re, _) = z_full(&v, &a, &b, &int(0), &int(0), &g).unwrap();
            let margin = crate::bmt::conj1_check(&v, &crate::tiltplane::TiltPoint::new(b.clone(), w), &g).unwrap();
            let v1b = v.v1_at(&b);
            prop_assert_eq!(re, margin - &a * &a / int(6) * v1b);
        }
    }
}
