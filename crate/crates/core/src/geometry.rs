//! Numerical model of a polarized projective surface or threefold and the
//! constants attached to it.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TiltError};
use crate::rational::{fmt_rat, int, max_rat, parse_rat, rat, serde_rat, serde_rat_array, Rat};

/// Numerical invariants of a polarized scheme `(X, H)`.
///
/// Fields are declared in alphabetical order so that the serialized JSON has
/// sorted keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Constant `D` in the parabolic bound `x^2/2 + D`.
    #[serde(with = "serde_rat")]
    pub bg_defect: Rat,
    /// Euler characteristic of the structure sheaf.
    #[serde(with = "serde_rat")]
    pub chi_o: Rat,
    pub dim: u32,
    /// Degree of the auxiliary divisor class against `H^(n-1)`.
    #[serde(with = "serde_rat")]
    pub gamma_dot_h: Rat,
    /// Top self-intersection `H^n`.
    #[serde(with = "serde_rat")]
    pub h_top: Rat,
    /// `K_X` is numerically `k_coeff * H`.
    #[serde(with = "serde_rat")]
    pub k_coeff: Rat,
    /// Step sizes of the four class components.
    #[serde(with = "serde_rat_array")]
    pub lattice: [Rat; 4],
    pub name: String,
    /// `td_2(X) . H`.
    #[serde(with = "serde_rat")]
    pub td2_dot_h: Rat,
}

impl Geometry {
    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(TiltError::pre(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if !self.h_top.is_positive() {
            return Err(TiltError::pre("h_top must be positive"));
        }
        if self.bg_defect.is_negative() {
            return Err(TiltError::pre("bg_defect must be non-negative"));
        }
        if self.gamma_dot_h.is_negative() {
            return Err(TiltError::pre("gamma_dot_h must be non-negative"));
        }
        if let Some(i) = self.lattice.iter().position(|d| !d.is_positive()) {
            return Err(TiltError::pre(format!("lattice step {i} must be positive")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let val: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| TiltError::parse("geometry", e.to_string()))?;
        // name the offending field before serde sees it
        if let Some(map) = val.as_object() {
            for (key, field) in map {
                match field {
                    serde_json::Value::String(s) if key != "name" => {
                        parse_rat(key, s)?;
                    }
                    serde_json::Value::Array(items) if key == "lattice" => {
                        for (i, item) in items.iter().enumerate() {
                            if let Some(s) = item.as_str() {
                                parse_rat(&format!("lattice[{i}]"), s)?;
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        let g: Geometry = serde_json::from_value(val)
            .map_err(|e| TiltError::parse("geometry", e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("geometry serializes");
        s.push('\n');
        s
    }

    /// `Gamma.H / H^n`, the coefficient that scales rank into the auxiliary
    /// pairing.
    pub fn xi(&self) -> Rat {
        &self.gamma_dot_h / &self.h_top
    }
}

/// Discrete data of a Fano threefold of Picard rank one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoPreset {
    pub index: u32,
    pub degree: Rat,
    pub genus: Rat,
}

impl FanoPreset {
    pub fn new(index: u32, degree: Rat) -> Result<Self> {
        if !(1..=4).contains(&index) {
            return Err(TiltError::pre(format!("Fano index must be in 1..=4, got {index}")));
        }
        if !degree.is_positive() {
            return Err(TiltError::pre("Fano degree must be positive"));
        }
        // Index 3 and 4 have a single deformation type each (quadric, P^3);
        // the tabulated a(3), a(4) only give chi(O(-H)) = 0 for those degrees.
        if index == 3 && degree != int(2) {
            return Err(TiltError::pre("index 3 requires degree 2"));
        }
        if index == 4 && degree != int(1) {
            return Err(TiltError::pre("index 4 requires degree 1"));
        }
        let i3 = int(i64::from(index.pow(3)));
        let genus = &degree * i3 / int(2) + Rat::one();
        Ok(Self { index, degree, genus })
    }

    /// Coefficient of `v1` in the Riemann-Roch expansion.
    pub fn a_coefficient(&self) -> Rat {
        let d = &self.degree;
        match self.index {
            1 => rat(1, 12) + int(2) / d,
            2 => rat(1, 3) + Rat::one() / d,
            3 => rat(13, 12),
            _ => rat(11, 6),
        }
    }

    pub fn geometry(&self) -> Geometry {
        let d = self.degree.clone();
        Geometry {
            bg_defect: Rat::zero(),
            chi_o: Rat::one(),
            dim: 3,
            gamma_dot_h: Rat::zero(),
            h_top: d.clone(),
            k_coeff: -int(i64::from(self.index)),
            lattice: [d.clone(), d.clone(), rat(1, 2), rat(1, 6)],
            name: format!("fano-i{}-d{}", self.index, fmt_rat(&d).replace('/', "_")),
            td2_dot_h: self.a_coefficient() * &d,
        }
    }
}

/// Geometry of a Fano threefold with the given index and degree, polarized by
/// the ample generator.
pub fn fano_preset(index: u32, degree: Rat) -> Result<Geometry> {
    Ok(FanoPreset::new(index, degree)?.geometry())
}

/// Inputs to [`bg_defect_constant`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectInputs {
    pub t1_plus: Rat,
    pub t1_minus: Rat,
    pub t2_plus: Rat,
    pub t2_minus: Rat,
    pub big_n: Rat,
    pub s_val: Rat,
    pub q_val: Rat,
    pub t3: Rat,
    pub ell: i64,
}

/// The additive constant of a parabolic Le Potier bound, assembled from the
/// cycle bounds `t`, the twist `N` and the auxiliary terms `s`, `q`.
pub fn bg_defect_constant(inp: &DefectInputs) -> Result<Rat> {
    if inp.ell < 2 {
        return Err(TiltError::pre(format!("ell must be at least 2, got {}", inp.ell)));
    }
    if inp.t1_plus < inp.t1_minus || inp.t2_plus < inp.t2_minus {
        return Err(TiltError::pre("expected t_plus >= t_minus"));
    }
    let t1 = max_rat(&inp.t1_plus.abs(), &inp.t1_minus.abs());
    let t2 = max_rat(&inp.t2_plus.abs(), &inp.t2_minus.abs());
    let spread = &inp.t1_plus - &inp.t1_minus + &inp.big_n;
    let base = &t1 * (&t1 + Rat::one()) + t2 + &spread * &spread / int(2);
    let ell = int(inp.ell);
    Ok(base + max_rat(&Rat::zero(), &inp.s_val) + (&ell + Rat::one()) * &inp.t3 * &inp.t3
        - (ell - Rat::one()) / int(2) * &inp.q_val)
}

/// Minimal admissible `theta` for the given `epsilon`, and the resulting
/// `Gamma(epsilon).H = theta H^n - td_2.H`.
pub fn gamma_epsilon_theta(geom: &Geometry, epsilon: &Rat) -> Result<(Rat, Rat)> {
    if !epsilon.is_positive() {
        return Err(TiltError::pre("epsilon must be positive"));
    }
    if !geom.h_top.is_positive() {
        return Err(TiltError::pre("h_top must be positive"));
    }
    let h = &geom.h_top;
    let td = &geom.td2_dot_h / h;
    let first = (int(2) + geom.chi_o.abs()) / (h * epsilon);
    let third = (int(2) + int(2) * (Rat::one() - &geom.chi_o).abs()) / (h * epsilon) - &td;
    let theta = max_rat(&max_rat(&first, &td), &third);
    let gamma = &theta * h - &geom.td2_dot_h;
    Ok((theta, gamma))
}

/// Upper bound for the Brill-Noether constant of a curve section with
/// `H^2 = h2`, for an even `s > 0`.
pub fn bn_bound(h2: &Rat, s: i64) -> Result<Rat> {
    if s <= 0 || s % 2 != 0 {
        return Err(TiltError::pre(format!("s must be a positive even integer, got {s}")));
    }
    if !h2.is_positive() {
        return Err(TiltError::pre("h2 must be positive"));
    }
    let s = int(s);
    let eight = int(8);
    let val = Rat::one()
        + h2 * (&s * &s - Rat::one()) / &eight
        + (h2 - &eight) / (&s * (&s + int(2)) * h2 + &eight);
    Ok(max_rat(&s, &val))
}

/// Hypothesis under which the threshold of [`bgn_criterion`] is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgnCase {
    SmoothSc,
    VeryAmple2h,
    RationalS,
}

impl BgnCase {
    pub fn offset(self) -> Rat {
        match self {
            BgnCase::SmoothSc => int(1),
            BgnCase::VeryAmple2h => rat(1, 2),
            BgnCase::RationalS => int(2),
        }
    }
}

/// `td_2.H > H^3/3 + c` with `c` fixed by the case.
pub fn bgn_criterion(geom: &Geometry, case: BgnCase) -> Result<bool> {
    if geom.dim != 3 {
        return Err(TiltError::pre("criterion needs a threefold"));
    }
    Ok(geom.td2_dot_h > &geom.h_top / int(3) + case.offset())
}
