//! Exact rational scalars and points of the projective line.
//!
//! `Rational` is an arbitrary-precision fraction; `num_rational` keeps it in
//! lowest terms with a positive denominator, which is exactly the invariant the
//! rest of the crate relies on. The helpers here cover the `"p/q"` string form
//! used by the CLI and the JSON interfaces, where infinity is spelled `inf`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// `n` as a rational.
pub fn rat_i(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics on `q == 0`; use only with literal arguments.
pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "rat() with zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Renders `x` as `"p"` or `"p/q"` with `q > 0`.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"`, `"p/q"`, or `"-p/q"`. Whitespace around tokens is accepted.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse { what: "rational", input: s.to_string() };
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err())?;
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(p, q))
}

/// Nearest `f64`, correctly rounded even for coefficients far outside the
/// exactly representable range.
pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A point of the projective line over the rationals: finite or infinity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Finite(Rational),
    Infinity,
}

impl Location {
    pub fn finite_i(n: i64) -> Self {
        Location::Finite(rat_i(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Location::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Location::Finite(x) => Some(x),
            Location::Infinity => None,
        }
    }

    /// String form used everywhere externally: `"p/q"` or `"inf"`.
    pub fn render(&self) -> String {
        match self {
            Location::Finite(x) => format_rational(x),
            Location::Infinity => "inf".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "inf" || t == "oo" {
            return Ok(Location::Infinity);
        }
        Ok(Location::Finite(parse_rational(t)?))
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// True iff `x` is an integer `>= 0`.
pub fn is_nonneg_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// `x` as `u64` if it is a small non-negative integer.
pub fn as_small_nonneg(x: &Rational) -> Option<u64> {
    if !x.is_integer() || x.is_negative() {
        return None;
    }
    let n = x.numer();
    if n > &BigInt::from(u64::MAX) {
        return None;
    }
    n.to_string().parse().ok()
}

/// `1` as a rational; shorthand used in closed-form builders.
pub fn one() -> Rational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "7/4", "-22/7", "1968"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(format_rational(&x), s);
        }
        // Non-canonical input is reduced on parse.
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn locations() {
        assert_eq!(Location::parse("inf").unwrap(), Location::Infinity);
        assert_eq!(Location::parse("1728").unwrap(), Location::finite_i(1728));
        assert_eq!(Location::finite_i(1728).render(), "1728");
        assert_eq!(Location::Infinity.render(), "inf");
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(rational_to_f64(&rat(1, 2)), 0.5);
        assert_eq!(rational_to_f64(&rat_i(1728)), 1728.0);
        let big = Rational::new(BigInt::from(10).pow(40) + 1, BigInt::from(3));
        let approx = rational_to_f64(&big);
        assert!((approx / (1e40 / 3.0) - 1.0).abs() < 1e-12);
    }
}
