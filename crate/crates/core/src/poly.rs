//! Univariate rational polynomials with certified real-root isolation.
//!
//! This is the bisection kernel behind every irrational quantity the crate
//! reports: roots are isolated with Sturm sequences and refined by exact
//! bisection, so every enclosure is a pair of rationals that provably
//! brackets the true value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{ceil_int, denom_lcm, floor_int, max_rat, min_rat, Rat};

/// Dense polynomial, constant term first. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

/// An isolating interval for one real root.
///
/// Either `lo == hi` (the root is exactly rational) or `lo < hi`, the
/// polynomial is non-zero at both ends and changes sign across the interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RootInterval {
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Interval Horner evaluation: an enclosure of `{p(x) : lo <= x <= hi}`.
    pub fn eval_interval(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        let mut acc = (Rat::zero(), Rat::zero());
        for c in self.coeffs.iter().rev() {
            let prods = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let mut mn = prods[0].clone();
            let mut mx = prods[0].clone();
            for p in &prods[1..] {
                mn = min_rat(&mn, p);
                mx = max_rat(&mx, p);
            }
            acc = (mn + c, mx + c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer((i as i64).into()))
                .collect(),
        )
    }

    fn scale(&self, k: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division `self = q * d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let dl = d.lead().unwrap().clone();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::new(vec![]), self.clone());
        }
        let mut q = vec![Rat::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    fn monic(&self) -> Poly {
        match self.lead() {
            Some(l) => self.scale(&(Rat::one() / l)),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Same real roots, each simple.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Rat::one()));
        }
        chain
    }

    /// Upper bound on the absolute value of every real root (Cauchy).
    pub fn root_bound(&self) -> Rat {
        let lead = self.lead().expect("zero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rat::zero(), |a, b| max_rat(&a, &b));
        m + Rat::one()
    }

    /// Isolating intervals for every distinct real root, in increasing order.
    pub fn real_roots(&self) -> Vec<RootInterval> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let sf = self.squarefree();
        let chain = sf.sturm_chain();
        let changes = |x: &Rat| -> usize {
            let signs: Vec<i32> = chain
                .iter()
                .map(|p| crate::rational::sign(&p.eval(x)))
                .filter(|s| *s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let bound = sf.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = stack.pop() {
            let count = changes(&a) - changes(&b);
            match count {
                0 => {}
                1 => out.push(RootInterval { lo: a, hi: b }),
                _ => {
                    let m = split_point(&sf, &a, &b);
                    stack.push((a, m.clone()));
                    stack.push((m, b));
                }
            }
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Halve an isolating interval once (it stays isolating).
    pub fn bisect(&self, iv: &RootInterval) -> RootInterval {
        if iv.is_exact() {
            return iv.clone();
        }
        let sa = crate::rational::sign(&self.eval(&iv.lo));
        let m = (&iv.lo + &iv.hi) / Rat::from_integer(2.into());
        let sm = crate::rational::sign(&self.eval(&m));
        if sm == 0 {
            RootInterval {
                lo: m.clone(),
                hi: m,
            }
        } else if sm == sa {
            RootInterval {
                lo: m,
                hi: iv.hi.clone(),
            }
        } else {
            RootInterval {
                lo: iv.lo.clone(),
                hi: m,
            }
        }
    }

    /// Refine an isolating interval of the squarefree part until its width is
    /// at most `eps`. Rational roots are detected and returned exactly.
    pub fn refine(&self, iv: &RootInterval, eps: &Rat) -> RootInterval {
        let sf = self.squarefree();
        let lead = sf.integer_lead();
        let mut cur = iv.clone();
        let mut probed = false;
        while !cur.is_exact() && cur.width() > *eps {
            if !probed && cur.width() * &lead <= Rat::one() {
                probed = true;
                if let Some(r) = sf.rational_root_in(&cur, &lead) {
                    return RootInterval { lo: r.clone(), hi: r };
                }
            }
            cur = sf.bisect(&cur);
        }
        cur
    }

    /// Absolute leading coefficient after clearing denominators and content.
    /// Every rational root has the form `k / lead` for an integer `k`.
    fn integer_lead(&self) -> Rat {
        let den = denom_lcm(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
        if content.is_zero() {
            return Rat::one();
        }
        Rat::from_integer((lead / content).abs())
    }

    fn rational_root_in(&self, iv: &RootInterval, lead: &Rat) -> Option<Rat> {
        let lo = ceil_int(&(&iv.lo * lead));
        let hi = floor_int(&(&iv.hi * lead));
        let mut k = lo;
        while k <= hi {
            let x = Rat::from_integer(k.clone()) / lead;
            if self.eval(&x).is_zero() {
                return Some(x);
            }
            k += 1;
        }
        None
    }
}

/// A point strictly inside `(a, b)` where `p` does not vanish.
fn split_point(p: &Poly, a: &Rat, b: &Rat) -> Rat {
    let w = b - a;
    let mut den: i64 = 2;
    loop {
        for num in 1..den {
            let m = a + &w * Rat::new(num.into(), den.into());
            if !p.eval(&m).is_zero() {
                return m;
            }
        }
        den += 1;
    }
}
