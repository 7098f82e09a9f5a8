//! Exact arithmetic in multiquadratic extensions of Q.
//!
//! A `Surd` is a finite sum `sum_m c_m sqrt(m)` over squarefree integer
//! kernels `m` (kernel `1` carrying the rational part, negative kernels the
//! imaginary directions). Sums, products, and inverses stay in this class, so
//! quantities like `1/2 + sqrt(1 + 4e)/2` can be combined and tested for
//! rationality without any floating point.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::factorint;
use crate::rational::{format_rational, rational_to_f64, Rational};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Surd {
    /// Squarefree kernel -> coefficient; no zero coefficients are stored.
    terms: BTreeMap<BigInt, Rational>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn from_rational(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(BigInt::one(), c);
        }
        Surd { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Surd::from_rational(Rational::from_integer(n.into()))
    }

    /// `sqrt(r)` with the principal branch (`sqrt(-a) = i sqrt(a)` for
    /// `a > 0`). Errors only if the radicand's integers resist factoring.
    pub fn sqrt_rational(r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Ok(Surd::zero());
        }
        // sqrt(p/q) = sqrt(p q) / |q|.
        let p = r.numer().clone();
        let q = r.denom().clone();
        let pq = &p * &q;
        let (s, c) = factorint::squarefree_decompose(&pq.magnitude().clone())?;
        let kernel = if pq.is_negative() { -BigInt::from(s) } else { BigInt::from(s) };
        let coeff = Rational::new(BigInt::from(c), q.abs());
        let mut out = Surd::zero();
        out.add_term(kernel, coeff);
        Ok(out)
    }

    fn add_term(&mut self, kernel: BigInt, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(kernel.clone()).or_insert_with(Rational::zero);
        *entry = &*entry + coeff;
        if entry.is_zero() {
            self.terms.remove(&kernel);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                if k.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// True for surds all of whose kernels are positive.
    pub fn is_real(&self) -> bool {
        self.terms.keys().all(|k| k.is_positive())
    }

    pub fn add(&self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Surd) -> Surd {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Surd {
        Surd { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }

    pub fn mul(&self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (j, a) in &self.terms {
            for (k, b) in &rhs.terms {
                let (kernel, scale) = mul_kernels(j, k);
                out.add_term(kernel, a * b * scale);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Surd {
        if c.is_zero() {
            return Surd::zero();
        }
        Surd { terms: self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect() }
    }

    /// Exact inverse via the product of Galois conjugates: the product of
    /// `self` with all its nontrivial conjugates is rational (the field norm),
    /// so dividing that product by the norm inverts `self`.
    pub fn inverse(&self) -> Result<Surd> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(c) = self.as_rational() {
            return Ok(Surd::from_rational(c.recip()));
        }
        let gens = self.generators()?;
        let mut cofactor = Surd::from_integer(1);
        // Iterate over all nonidentity sign patterns on the generators.
        for mask in 1u32..(1 << gens.len()) {
            cofactor = cofactor.mul(&self.conjugate(&gens, mask));
        }
        let norm = self
            .mul(&cofactor)
            .as_rational()
            .expect("product over the full Galois orbit is rational");
        Ok(cofactor.scale(&norm.recip()))
    }

    /// Prime kernels generating the extension containing `self`; `-1` is
    /// listed as a generator when any kernel is negative.
    fn generators(&self) -> Result<Vec<BigInt>> {
        let mut gens: BTreeSet<BigInt> = BTreeSet::new();
        for k in self.terms.keys() {
            if k.is_negative() {
                gens.insert(BigInt::from(-1));
            }
            for (p, _) in factorint::factor(&k.magnitude().clone())? {
                gens.insert(BigInt::from(p));
            }
        }
        Ok(gens.into_iter().collect())
    }

    /// Applies the automorphism flipping `sqrt(g)` for each generator selected
    /// by `mask`. A term `c sqrt(m)` changes sign once per selected generator
    /// dividing `m` (with `-1` counting as dividing negative kernels).
    fn conjugate(&self, gens: &[BigInt], mask: u32) -> Surd {
        let mut out = Surd::zero();
        for (kernel, coeff) in &self.terms {
            let mut flips = 0u32;
            for (i, g) in gens.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let divides = if g.magnitude().is_one() {
                    kernel.is_negative()
                } else {
                    kernel.magnitude().is_multiple_of(g.magnitude())
                };
                if divides {
                    flips += 1;
                }
            }
            let c = if flips % 2 == 1 { -coeff.clone() } else { coeff.clone() };
            out.add_term(kernel.clone(), c);
        }
        out
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mag = k.magnitude().to_f64().unwrap_or(f64::INFINITY).sqrt();
            let root = if k.is_negative() {
                Complex64::new(0.0, mag)
            } else {
                Complex64::new(mag, 0.0)
            };
            acc += root * rational_to_f64(c);
        }
        acc
    }
}

/// `sqrt(j) * sqrt(k)` for squarefree `j`, `k`: a squarefree kernel and a
/// rational multiplier.
fn mul_kernels(j: &BigInt, k: &BigInt) -> (BigInt, Rational) {
    if j.is_one() {
        return (k.clone(), Rational::one());
    }
    if k.is_one() {
        return (j.clone(), Rational::one());
    }
    let g = j.magnitude().gcd(k.magnitude());
    let m = (j.magnitude() * k.magnitude()) / (&g * &g);
    let both_negative = j.is_negative() && k.is_negative();
    let mixed = j.is_negative() ^ k.is_negative();
    let kernel = if mixed && !m.is_one() {
        -BigInt::from(m)
    } else if mixed {
        // sqrt(-a) sqrt(a) = a i = a sqrt(-1).
        BigInt::from(-1)
    } else {
        BigInt::from(m)
    };
    let mut scale = Rational::from_integer(BigInt::from(g));
    if both_negative {
        scale = -scale;
    }
    (kernel, scale)
}

impl std::fmt::Display for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
                first = false;
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            if k.is_one() {
                f.write_str(&format_rational(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", format_rational(&mag))?;
                }
                write!(f, "sqrt({k})")?;
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Surd({self})")
    }
}
