//! Tilt invariants read off Hilbert polynomials, for arbitrary polarized
//! projective schemes.
//!
//! Polynomials are coefficient lists, constant term first. The invariants
//! `alpha_i` satisfy `P(m) = sum alpha_i m^i / i!`.

use num_traits::{One, Signed, Zero};

use crate::error::{Result, TiltError};
use crate::rational::{int, Rat};

fn factorial(i: usize) -> Rat {
    (1..=i as i64).fold(Rat::one(), |acc, k| acc * int(k))
}

fn binomial(n: usize, k: usize) -> Rat {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `alpha_i = i! c_i`.
pub fn alpha_from_poly(coeffs: &[Rat]) -> Result<Vec<Rat>> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(TiltError::pre("zero polynomial"));
    }
    let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
    Ok(coeffs[..=last]
        .iter()
        .enumerate()
        .map(|(i, c)| c * factorial(i))
        .collect())
}

/// `m -> P(m + shift)`, i.e. the Hilbert polynomial of a twist by `O(shift)`.
pub fn shift_poly(coeffs: &[Rat], shift: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); coeffs.len()];
    for (k, c) in coeffs.iter().enumerate() {
        let mut pow = Rat::one();
        for j in (0..=k).rev() {
            // coefficient of m^j in c (m + shift)^k
            out[j] += c * binomial(k, j) * &pow;
            pow *= shift;
        }
    }
    out
}

/// Hilbert data of the structure sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertData {
    n: usize,
    coeffs_o: Vec<Rat>,
    alpha_o: Vec<Rat>,
}

impl HilbertData {
    /// `coeffs` of `chi(O(m))`, of exact degree `n >= 2` with positive
    /// leading coefficient.
    pub fn new(coeffs: Vec<Rat>) -> Result<Self> {
        let alpha_o = alpha_from_poly(&coeffs)?;
        let n = alpha_o.len() - 1;
        if n < 2 {
            return Err(TiltError::pre(format!("dimension must be at least 2, got {n}")));
        }
        if !alpha_o[n].is_positive() {
            return Err(TiltError::pre("leading coefficient must be positive"));
        }
        let mut coeffs_o = coeffs;
        coeffs_o.truncate(n + 1);
        Ok(Self { n, coeffs_o, alpha_o })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs_o
    }

    pub fn alpha(&self) -> &[Rat] {
        &self.alpha_o
    }

    /// `H^n`.
    pub fn degree(&self) -> &Rat {
        &self.alpha_o[self.n]
    }
}

/// `(rk, deg_H, c2_H)` of a sheaf with Hilbert polynomial `e`.
pub fn rk_deg_c2(e: &[Rat], base: &HilbertData) -> Result<(Rat, Rat, Rat)> {
    let n = base.n;
    if e.len() > n + 1 && e[n + 1..].iter().any(|c| !c.is_zero()) {
        return Err(TiltError::pre(format!(
            "polynomial degree exceeds the dimension {n}"
        )));
    }
    let a_o = &base.alpha_o;
    if a_o[n].is_zero() {
        return Err(TiltError::pre("alpha_n(O) vanishes"));
    }
    let a_e: Vec<Rat> = (0..=n)
        .map(|i| e.get(i).cloned().unwrap_or_else(Rat::zero) * factorial(i))
        .collect();
    let rk = &a_e[n] / &a_o[n];
    let deg = &a_e[n - 1] - &rk * &a_o[n - 1];
    let c2 = &a_e[n - 2] - &rk * &a_o[n - 2] - &a_o[n - 1] / &a_o[n] * &deg;
    Ok((rk, deg, c2))
}

/// The BG-type constant `N^2 + (a_{n-1}/a_n)^2 - 2 a_{n-2}/a_n - (n+1)/12`.
pub fn n_constant(alpha_o: &[Rat], big_n: &Rat) -> Result<Rat> {
    if alpha_o.len() < 3 {
        return Err(TiltError::pre("need alpha_0 .. alpha_n with n >= 2"));
    }
    let n = alpha_o.len() - 1;
    let top = &alpha_o[n];
    if top.is_zero() {
        return Err(TiltError::pre("alpha_n(O) vanishes"));
    }
    let r = &alpha_o[n - 1] / top;
    Ok(big_n * big_n + &r * &r - int(2) * &alpha_o[n - 2] / top
        - Rat::new(((n + 1) as i64).into(), 12.into()))
}

/// `(-c2 + t rk, deg - s rk)`.
pub fn tau_charge(triple: &(Rat, Rat, Rat), s: &Rat, t: &Rat) -> (Rat, Rat) {
    let (rk, deg, c2) = triple;
    (-c2 + t * rk, deg - s * rk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p2() -> Vec<Rat> {
        vec![int(1), rat(3, 2), rat(1, 2)]
    }

    fn p3() -> Vec<Rat> {
        vec![int(1), rat(11, 6), int(1), rat(1, 6)]
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_from_poly(&p2()).unwrap(), vec![int(1), rat(3, 2), int(1)]);
        assert_eq!(alpha_from_poly(&p3()).unwrap(), vec![int(1), rat(11, 6), int(2), int(1)]);
        assert_eq!(alpha_from_poly(&[int(4)]).unwrap(), vec![int(4)]);
        assert!(alpha_from_poly(&[int(0), int(0)]).is_err());
    }

    #[test]
    fn structure_sheaf_is_trivial() {
        for c in [p2(), p3()] {
            let base = HilbertData::new(c.clone()).unwrap();
            assert_eq!(rk_deg_c2(&c, &base).unwrap(), (int(1), int(0), int(0)));
        }
    }

    #[test]
    fn twist_on_plane() {
        let base = HilbertData::new(p2()).unwrap();
        let o1 = shift_poly(&p2(), &int(1));
        assert_eq!(alpha_from_poly(&o1).unwrap(), vec![int(3), rat(5, 2), int(1)]);
        assert_eq!(rk_deg_c2(&o1, &base).unwrap(), (int(1), int(1), rat(1, 2)));
    }

    #[test]
    fn n_constant_examples() {
        let a = alpha_from_poly(&p2()).unwrap();
        assert_eq!(n_constant(&a, &int(0)).unwrap(), int(0));
        assert_eq!(n_constant(&a, &int(1)).unwrap(), int(1));
        assert!(n_constant(&[int(1), int(1), int(0)], &int(0)).is_err());
    }

    #[test]
    fn tau_examples() {
        let o = (int(1), int(0), int(0));
        assert_eq!(tau_charge(&o, &rat(2, 3), &int(5)), (int(5), rat(-2, 3)));
        let e = (int(2), int(3), rat(1, 2));
        assert_eq!(tau_charge(&e, &int(0), &int(0)), (rat(-1, 2), int(3)));
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(HilbertData::new(vec![int(1), int(1)]).is_err());
        assert!(HilbertData::new(vec![int(1), int(1), int(-1)]).is_err());
    }
}
