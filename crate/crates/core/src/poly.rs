//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are exact `Rational`s stored low degree first, with the leading
//! coefficient nonzero (the zero polynomial has an empty coefficient vector).
//! Degrees in this crate stay small (well under a hundred), so the dense
//! representation and classical algorithms are the right tradeoff.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::factorint;
use crate::rational::{format_rational, rat_i, Rational};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The variable `y`.
    pub fn y() -> Self {
        Poly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `y - a`.
    pub fn linear_root(a: &Rational) -> Self {
        Poly::from_coeffs(vec![-a.clone(), Rational::one()])
    }

    /// From `coeffs[i] = ` coefficient of `y^i`; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat_i(c)).collect())
    }

    pub fn monomial(deg: usize, coef: Rational) -> Self {
        if coef.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = coef;
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = 0`; callers must have excluded zero
    /// when the distinction matters.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_i(i as i64))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// `p(c * y)`.
    pub fn scale_var(&self, c: &Rational) -> Poly {
        let mut pow = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a * &pow;
                pow = &pow * c;
                out
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// `p(g(y))` by Horner.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `p(y + a)`.
    pub fn shift(&self, a: &Rational) -> Poly {
        self.compose(&Poly::from_coeffs(vec![a.clone(), Rational::one()]))
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = self.coeffs.clone();
        let dd = d.deg();
        let lead_inv = d.leading().recip();
        if r.len() < d.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        while r.len() >= d.coeffs.len() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() * &lead_inv;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    let idx = k + i;
                    r[idx] = &r[idx] - &(dc * &c);
                }
                q[k] = c;
            }
            r.pop();
            while r.last().map_or(false, |c| c.is_zero()) {
                r.pop();
            }
            if r.len() < d.coeffs.len() {
                break;
            }
        }
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Invalid(format!("inexact polynomial division by {d}")));
        }
        Ok(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Writes `self = (a/b) * P` with `P` primitive over the integers (content
    /// one, positive leading coefficient); returns `(P, a/b)`.
    pub fn primitive_integer(&self) -> (Vec<BigInt>, Rational) {
        if self.is_zero() {
            return (vec![], Rational::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| c.numer() * (&den_lcm / c.denom())).collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        if ints.last().map_or(false, |c| c.is_negative()) {
            content = -content;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
        (prim, Rational::new(content, den_lcm))
    }

    /// Yun squarefree decomposition: `self = lc * prod a_i^i` with the `a_i`
    /// monic, squarefree, pairwise coprime. Only factors with `a_i != 1` are
    /// returned, as `(a_i, i)` pairs in ascending multiplicity.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let p = self.monic();
        let dp = p.derivative();
        let mut out = vec![];
        let a0 = Poly::gcd(&p, &dp);
        let mut b = p.div_exact(&a0).expect("gcd divides");
        let mut c = dp.div_exact(&a0).expect("gcd divides");
        let mut i = 1u32;
        loop {
            let d = &c - &b.derivative();
            let a = Poly::gcd(&b, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).expect("gcd divides");
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_exact(&a).expect("gcd divides");
            i += 1;
        }
        out
    }

    /// All rational roots of `self` (squarefree or not), without multiplicity.
    /// Complete by the rational root theorem; errors only if the coefficient
    /// integers resist factorization.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::Invalid("rational_roots of the zero polynomial".into()));
        }
        let mut p = self.clone();
        let mut roots = vec![];
        // Pull out the root at zero first so the constant term is nonzero.
        if p.coeff(0).is_zero() {
            roots.push(Rational::zero());
            while p.coeff(0).is_zero() && !p.is_zero() {
                p = Poly::from_coeffs(p.coeffs[1..].to_vec());
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            roots.sort();
            return Ok(roots);
        }
        let (ints, _) = p.primitive_integer();
        let a0: BigUint = ints[0].magnitude().clone();
        let an: BigUint = ints.last().unwrap().magnitude().clone();
        const DIVISOR_CAP: usize = 20_000;
        let p_divs = factorint::divisors(&factorint::factor(&a0)?, DIVISOR_CAP)
            .ok_or_else(|| Error::Invalid("root search: too many divisors of the constant term".into()))?;
        let q_divs = factorint::divisors(&factorint::factor(&an)?, DIVISOR_CAP)
            .ok_or_else(|| Error::Invalid("root search: too many divisors of the leading term".into()))?;
        if p_divs.len().saturating_mul(q_divs.len()) > 2_000_000 {
            return Err(Error::Invalid("root search: candidate set too large".into()));
        }
        for num in &p_divs {
            for den in &q_divs {
                if !num.gcd(den).is_one() {
                    continue;
                }
                for sign in [1i64, -1] {
                    let cand = Rational::new(
                        BigInt::from(num.clone()) * BigInt::from(sign),
                        BigInt::from(den.clone()),
                    );
                    if p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

/// Squarefree factors with multiplicities, with every rational linear factor
/// split off, plus the multiset of rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    /// `(factor, multiplicity)`, factors monic and squarefree; rational roots
    /// appear as `y - a`, the non-linear residuals have no rational roots.
    pub factors: Vec<(Poly, u32)>,
    /// `(root, multiplicity)`, ascending by root.
    pub roots: Vec<(Rational, u32)>,
}

impl Factored {
    /// True iff the polynomial splits into rational linear factors.
    pub fn splits(&self) -> bool {
        self.factors.iter().all(|(f, _)| f.deg() == 1)
    }

    /// The product of all recorded factors (monic).
    pub fn reassemble(&self) -> Poly {
        let mut acc = Poly::one();
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m);
        }
        acc
    }
}

/// Squarefree decomposition plus complete rational root extraction.
///
/// `y^2 (y - 1728)^2` yields factors `[(y, 2), (y - 1728, 2)]` and roots
/// `[(0, 2), (1728, 2)]`; an irreducible-over-Q factor such as `y^2 + 1` is
/// reported as a factor with no roots, never silently dropped.
pub fn squarefree_and_roots(p: &Poly) -> Result<Factored> {
    if p.is_zero() {
        return Err(Error::Invalid("cannot factor the zero polynomial".into()));
    }
    let mut factors: Vec<(Poly, u32)> = vec![];
    let mut roots: Vec<(Rational, u32)> = vec![];
    for (sf, mult) in p.squarefree_decomposition() {
        let rs = sf.rational_roots()?;
        let mut residual = sf.clone();
        for root in &rs {
            residual = residual.div_exact(&Poly::linear_root(root))?;
            factors.push((Poly::linear_root(root), mult));
            roots.push((root.clone(), mult));
        }
        if residual.degree().unwrap_or(0) > 0 {
            factors.push((residual.monic(), mult));
        }
    }
    factors.sort_by(|a, b| {
        a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)).then(a.1.cmp(&b.1))
    });
    roots.sort();
    Ok(Factored { factors, roots })
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::from_coeffs(coeffs)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::from_coeffs(coeffs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = c.is_negative();
            if first {
                if sign {
                    f.write_str("-")?;
                }
                first = false;
            } else if sign {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let show_coef = !mag.is_one() || i == 0;
            if show_coef {
                f.write_str(&format_rational(&mag))?;
            }
            if i > 0 {
                if show_coef {
                    f.write_str("*")?;
                }
                if i == 1 {
                    f.write_str("y")?;
                } else {
                    write!(f, "y^{i}")?;
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn construction_normalizes() {
        let p = Poly::from_coeffs(vec![rat_i(1), rat_i(0), rat_i(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::from_ints(&[]).is_zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn arithmetic_and_division() {
        // (y^2 - 1) / (y - 1) = y + 1 exactly.
        let num = Poly::from_ints(&[-1, 0, 1]);
        let den = Poly::from_ints(&[-1, 1]);
        assert_eq!(num.div_exact(&den).unwrap(), Poly::from_ints(&[1, 1]));

        let a = Poly::from_ints(&[1, 2, 3]);
        let b = Poly::from_ints(&[-4, 5]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);

        assert!(a.div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn long_division_reconstruction_randomized() {
        // Oracle: for random a, b the identity a = q b + r with deg r < deg b.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let da = rng.gen_range(0..8);
            let db = rng.gen_range(0..5);
            let a = Poly::from_coeffs(
                (0..=da).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect(),
            );
            let mut b = Poly::from_coeffs(
                (0..=db).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect(),
            );
            if b.is_zero() {
                b = Poly::one();
            }
            let (q, r) = a.div_rem(&b).unwrap();
            assert_eq!(&(&q * &b) + &r, a);
            assert!(r.is_zero() || r.deg() < b.deg());
        }
    }

    #[test]
    fn gcd_and_monic() {
        let a = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[2, 1]); // (y-1)(y+2)
        let b = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[5, 1]); // (y-1)(y+5)
        assert_eq!(Poly::gcd(&a, &b), Poly::from_ints(&[-1, 1]));
        assert_eq!(Poly::gcd(&Poly::zero(), &Poly::zero()), Poly::zero());
    }

    #[test]
    fn eval_compose_scale() {
        let p = Poly::from_ints(&[1, -3, 2]); // 2y^2 - 3y + 1
        assert_eq!(p.eval(&rat_i(2)), rat_i(3));
        assert_eq!(p.scale_var(&rat_i(2)), Poly::from_ints(&[1, -6, 8]));
        let q = p.compose(&Poly::from_ints(&[1, 1])); // p(y+1)
        assert_eq!(q.eval(&rat_i(1)), p.eval(&rat_i(2)));
        assert_eq!(p.shift(&rat_i(1)), q);
    }

    #[test]
    fn yun_on_repeated_factors() {
        // y^2 (y - 1728)^2: one squarefree factor of multiplicity 2.
        let p = &Poly::from_ints(&[0, 1]).pow(2) * &Poly::from_ints(&[-1728, 1]).pow(2);
        let sf = p.squarefree_decomposition();
        assert_eq!(sf.len(), 1);
        assert_eq!(sf[0].1, 2);
        assert_eq!(sf[0].0, &Poly::from_ints(&[0, 1]) * &Poly::from_ints(&[-1728, 1]));
    }

    #[test]
    fn roots_and_factored_form() {
        let p = &Poly::from_ints(&[0, 1]).pow(2) * &Poly::from_ints(&[-1728, 1]).pow(2);
        let f = squarefree_and_roots(&p).unwrap();
        assert_eq!(f.roots, vec![(rat_i(0), 2), (rat_i(1728), 2)]);
        assert!(f.splits());
        assert_eq!(f.reassemble(), p.monic());

        // y^2 + 1 has no rational roots but is still reported as a factor.
        let g = Poly::from_ints(&[1, 0, 1]);
        let f = squarefree_and_roots(&g).unwrap();
        assert!(f.roots.is_empty());
        assert_eq!(f.factors, vec![(g.clone(), 1)]);
        assert!(!f.splits());

        // Fractional roots: (2y - 1)(3y + 2).
        let h = &Poly::from_ints(&[-1, 2]) * &Poly::from_ints(&[2, 3]);
        let f = squarefree_and_roots(&h).unwrap();
        assert_eq!(f.roots, vec![(rat(-2, 3), 1), (rat(1, 2), 1)]);
    }

    #[test]
    fn primitive_integer_form() {
        let p = Poly::from_coeffs(vec![rat(1, 6), rat(-1, 4)]); // -(1/4)y + 1/6
        let (ints, scale) = p.primitive_integer();
        assert_eq!(ints, vec![BigInt::from(-2), BigInt::from(3)]);
        assert_eq!(scale, rat(-1, 12));
        // Reconstruct.
        let back = Poly::from_coeffs(ints.iter().map(|c| Rational::from(c.clone()) * &scale).collect());
        assert_eq!(back, p);
    }

    #[test]
    fn display_form() {
        let p = Poly::from_coeffs(vec![rat_i(32), rat(-41, 1), rat_i(36)]);
        assert_eq!(p.to_string(), "36*y^2 - 41*y + 32");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::from_ints(&[0, -1]).to_string(), "-y");
    }
}
