//! Rational functions over Q in lowest terms, with exact partial fractions.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{squarefree_and_roots, Poly};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::{Error, Result};

/// `num / den`, coprime, `den` monic and nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        } else {
            (num, den)
        };
        let lead = den.leading();
        Ok(RatFunc { num: num.scale(&lead.recip()), den: den.monic() })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn from_rational(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The variable `y`.
    pub fn y() -> Self {
        RatFunc::from_poly(Poly::y())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_polynomial() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::PoleEvaluation(format_rational(x)));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn derivative(&self) -> RatFunc {
        // (n/d)' = (n'd - nd')/d^2; reduction handled by the constructor.
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let den = &self.den * &self.den;
        RatFunc::new(num, den).expect("denominator nonzero")
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn try_div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone()).expect("denominator nonzero")
    }

    /// `f(c * y)` for `c != 0`.
    pub fn scale_var(&self, c: &Rational) -> Result<RatFunc> {
        if c.is_zero() {
            return Err(Error::Invalid("scale_var by zero".into()));
        }
        RatFunc::new(self.num.scale_var(c), self.den.scale_var(c))
    }

    /// `f(y + a)`.
    pub fn shift(&self, a: &Rational) -> RatFunc {
        RatFunc::new(self.num.shift(a), self.den.shift(a)).expect("denominator nonzero")
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Order of vanishing at infinity: `deg den - deg num`; the zero function
    /// has no order (`None`). Positive means a zero at infinity, negative a
    /// pole.
    pub fn order_at_infinity(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.den.deg() as i64 - self.num.deg() as i64)
    }

    /// Order of vanishing at a finite point (negative at a pole, `None` for
    /// the zero function).
    pub fn order_at(&self, a: &Rational) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let lin = Poly::linear_root(a);
        let count = |mut p: Poly| -> i64 {
            let mut k = 0;
            loop {
                let (q, r) = p.div_rem(&lin).expect("nonzero divisor");
                if !r.is_zero() {
                    return k;
                }
                k += 1;
                p = q;
            }
        };
        Some(count(self.num.clone()) - count(self.den.clone()))
    }

    /// Finite poles as `(point, order)`, ascending by point. Errors if some
    /// denominator factor has no rational root.
    pub fn poles(&self) -> Result<Vec<(Rational, u32)>> {
        let f = squarefree_and_roots(&self.den)?;
        for (factor, _) in &f.factors {
            if factor.deg() > 1 {
                return Err(Error::IrrationalPole {
                    degree: factor.deg(),
                    factor: factor.to_string(),
                });
            }
        }
        Ok(f.roots)
    }

    /// Exact partial fraction decomposition; requires the denominator to split
    /// over Q.
    pub fn partial_fractions(&self) -> Result<PartialFractionForm> {
        let (poly, rem) = self.num.div_rem(&self.den)?;
        let mut parts = BTreeMap::new();
        for (point, mult) in self.poles()? {
            // Shift the pole to the origin: f(t + a) = N(t) / (t^m E(t)).
            let shifted_den = self.den.shift(&point);
            let mut e = shifted_den;
            for _ in 0..mult {
                e = Poly::from_coeffs(e.coeffs()[1..].to_vec());
            }
            let n = rem.shift(&point);
            // First `mult` power series coefficients of N/E at t = 0.
            let e0 = e.coeff(0).recip();
            let mut s = Vec::with_capacity(mult as usize);
            for j in 0..mult as usize {
                let mut acc = n.coeff(j);
                for (i, si) in s.iter().enumerate().take(j) {
                    acc = acc - si * &e.coeff(j - i);
                }
                s.push(acc * &e0);
            }
            // Coefficient of (y - a)^{-k} is s[m - k].
            let coeffs: Vec<Rational> =
                (1..=mult as usize).map(|k| s[mult as usize - k].clone()).collect();
            parts.insert(point, coeffs);
        }
        Ok(PartialFractionForm { poly, parts })
    }

    /// Coefficient of `(y - a)^{-k}` in the partial fraction expansion, zero
    /// when `a` is not a pole of order `>= k`.
    pub fn principal_coeff(&self, a: &Rational, k: u32) -> Result<Rational> {
        let pf = self.partial_fractions()?;
        Ok(pf.principal_coeff(a, k))
    }

    /// Partial fractions against a caller-supplied pole list. The list must
    /// exhaust the denominator: every actual pole has to appear in it.
    pub fn partial_fractions_at(&self, poles: &[Rational]) -> Result<PartialFractionForm> {
        let pf = self.partial_fractions()?;
        for point in pf.parts.keys() {
            if !poles.contains(point) {
                return Err(Error::Invalid(format!(
                    "pole list does not exhaust the denominator: missing {}",
                    format_rational(point)
                )));
            }
        }
        Ok(pf)
    }
}

/// `poly + sum over points a of sum_k parts[a][k-1] / (y - a)^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractionForm {
    pub poly: Poly,
    /// Keyed by pole; entry `k-1` holds the coefficient of `(y - a)^{-k}`.
    pub parts: BTreeMap<Rational, Vec<Rational>>,
}

impl PartialFractionForm {
    pub fn principal_coeff(&self, a: &Rational, k: u32) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.parts
            .get(a)
            .and_then(|v| v.get(k as usize - 1))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn reconstruct(&self) -> RatFunc {
        let mut acc = RatFunc::from_poly(self.poly.clone());
        for (a, coeffs) in &self.parts {
            for (i, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = RatFunc::new(
                    Poly::constant(c.clone()),
                    Poly::linear_root(a).pow(i as u32 + 1),
                )
                .expect("denominator nonzero");
                acc = &acc + &term;
            }
        }
        acc
    }
}

impl std::ops::Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("denominator nonzero")
    }
}

impl std::ops::Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl std::ops::Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        // Cross-reduce before multiplying to keep intermediates small.
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFunc::new(&n1 * &n2, &d1 * &d2).expect("denominator nonzero")
    }
}

impl std::fmt::Display for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

fn poly_to_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn poly_from_strings(v: &[String]) -> Result<Poly> {
    let coeffs = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(coeffs))
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    /// Numerator coefficients, low degree first, as `p/q` strings.
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncRepr { num: poly_to_strings(&self.num), den: poly_to_strings(&self.den) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RatFuncRepr::deserialize(d)?;
        let num = poly_from_strings(&repr.num).map_err(D::Error::custom)?;
        let den = poly_from_strings(&repr.den).map_err(D::Error::custom)?;
        RatFunc::new(num, den).map_err(D::Error::custom)
    }
}
