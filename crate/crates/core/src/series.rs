//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A series stores the coefficients of `q^val .. q^(prec-1)`; everything from
//! `q^prec` on is unknown. Precision is tracked through every operation with
//! the exact propagation rules (no silent loss), so a downstream check that
//! reads `coeff(n)` either gets a correct value or a `PrecisionTooSmall`
//! error. `prec = i64::MAX` marks an exact series (polynomials in `q`).

use num_traits::{One, Signed, Zero};

use crate::ratfunc::RatFunc;
use crate::rational::{format_rational, Rational};
use crate::{Error, Result};

pub const EXACT: i64 = i64::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    /// Exponent of `coeffs[0]`; meaningful only when `coeffs` is nonempty, in
    /// which case `coeffs[0] != 0`.
    val: i64,
    coeffs: Vec<Rational>,
    /// Coefficients of exponents `< prec` are known.
    prec: i64,
}

fn sat(a: i64, b: i64) -> i64 {
    a.saturating_add(b)
}

/// Shift a precision horizon, treating `EXACT` as absorbing infinity.
fn prec_shift(p: i64, shift: i64) -> i64 {
    if p == EXACT {
        EXACT
    } else {
        p.saturating_add(shift)
    }
}

impl LaurentSeries {
    pub fn new(val: i64, coeffs: Vec<Rational>, prec: i64) -> Self {
        let mut s = LaurentSeries { val, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        // Drop coefficients at or beyond the precision horizon.
        if self.prec != EXACT {
            let keep = (self.prec - self.val).max(0) as usize;
            self.coeffs.truncate(keep.min(self.coeffs.len()));
        }
        // Strip leading zeros so val points at a nonzero coefficient.
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = 0;
        }
    }

    pub fn zero(prec: i64) -> Self {
        LaurentSeries { val: 0, coeffs: vec![], prec }
    }

    pub fn constant(c: Rational) -> Self {
        LaurentSeries::new(0, vec![c], EXACT)
    }

    pub fn q_power(k: i64) -> Self {
        LaurentSeries::new(k, vec![Rational::one()], EXACT)
    }

    /// True when no coefficient below the precision horizon is nonzero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact valuation; `None` when the series is zero to available precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound on the valuation, usable even for the zero series.
    fn val_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn truncate(&self, prec: i64) -> Self {
        LaurentSeries::new(self.val, self.coeffs.clone(), self.prec.min(prec))
    }

    /// Coefficient of `q^n`; errors if `n` is at or beyond the horizon.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n >= self.prec {
            return Err(Error::PrecisionTooSmall { needed: n + 1, have: self.prec });
        }
        let idx = n - self.val;
        if idx < 0 || self.coeffs.is_empty() {
            return Ok(Rational::zero());
        }
        Ok(self.coeffs.get(idx as usize).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero(self.prec);
        }
        LaurentSeries::new(self.val, self.coeffs.iter().map(|a| a * c).collect(), self.prec)
    }

    /// `q d/dq`: multiplies the coefficient of `q^n` by `n`.
    pub fn d_log(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_integer((self.val + i as i64).into()))
            .collect();
        LaurentSeries::new(self.val, coeffs, self.prec)
    }

    /// Plain `d/dq`; shifts every exponent down by one, so a horizon at
    /// `q^p` becomes a horizon at `q^(p-1)`.
    pub fn derivative(&self) -> Self {
        let d = self.d_log();
        let prec = if d.prec == EXACT { EXACT } else { d.prec - 1 };
        LaurentSeries::new(d.val - 1, d.coeffs, prec)
    }

    /// Multiplicative inverse; requires a nonzero leading coefficient, and
    /// costs `2 * val` of precision when `val > 0` (none when `val <= 0`
    /// gains, by the exact rule `prec' = prec - 2 val`).
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::SeriesUndefined);
        }
        let n = if self.prec == EXACT {
            // An exact finite series still has an infinite inverse; cap the
            // working window generously relative to the data we have.
            self.coeffs.len().max(64) * 2
        } else {
            (self.prec - self.val).max(0) as usize
        };
        let lead_inv = self.coeffs[0].recip();
        let mut inv = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                inv.push(lead_inv.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc = acc + &self.coeffs[j] * &inv[k - j];
            }
            inv.push(-acc * &lead_inv);
        }
        let prec = if self.prec == EXACT { EXACT } else { self.prec - 2 * self.val };
        // An exact polynomial's inverse is only known over the computed
        // window unless the polynomial is a monomial.
        let prec = if self.prec == EXACT && self.coeffs.len() > 1 {
            -self.val + n as i64
        } else {
            prec
        };
        Ok(LaurentSeries::new(-self.val, inv, prec))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut e = e as u64;
        let mut base = self.clone();
        let mut acc = LaurentSeries::constant(Rational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Substitute `g` (valuation `>= 1`) for the variable of `self`.
    pub fn compose(&self, g: &LaurentSeries) -> Result<Self> {
        let vg = g.val_bound();
        if vg < 1 {
            return Err(Error::Invalid("series composition needs valuation >= 1".into()));
        }
        let vf = self.val_bound();
        // Truncation of f contributes O(q^(vg * prec_f)); the uncertainty in g
        // contributes O(q^(vg (vf - 1) + prec_g)).
        let prec = if self.prec == EXACT && g.prec == EXACT {
            EXACT
        } else {
            let from_f =
                if self.prec == EXACT { EXACT } else { self.prec.saturating_mul(vg) };
            let from_g = if g.prec == EXACT { EXACT } else { sat(vg.saturating_mul(vf - 1), g.prec) };
            from_f.min(from_g)
        };
        if self.coeffs.is_empty() {
            return Ok(LaurentSeries::zero(prec));
        }
        let mut acc = LaurentSeries::zero(prec);
        let mut gpow = g.pow(self.val)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                gpow = &gpow * g;
            }
            if c.is_zero() {
                continue;
            }
            acc = &acc + &gpow.scale(c);
        }
        Ok(acc.truncate(prec))
    }

    /// Terms from `q^lo` (inclusive) to `q^hi` (exclusive) as `(n, coeff)`.
    pub fn terms(&self, lo: i64, hi: i64) -> Result<Vec<(i64, Rational)>> {
        let mut out = vec![];
        for n in lo..hi {
            let c = self.coeff(n)?;
            if !c.is_zero() {
                out.push((n, c));
            }
        }
        Ok(out)
    }
}

impl std::ops::Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(rhs.prec);
        if self.coeffs.is_empty() && rhs.coeffs.is_empty() {
            return LaurentSeries::zero(prec);
        }
        let lo = self.val_bound().min(rhs.val_bound());
        // Coefficients past the support of both operands are zero; never
        // materialize them, even when the horizon is far away.
        let hi = sat(self.val, self.coeffs.len() as i64)
            .max(sat(rhs.val, rhs.coeffs.len() as i64))
            .min(prec);
        let mut coeffs = Vec::with_capacity((hi - lo).max(0) as usize);
        for n in lo..hi {
            let a = self.coeff(n).unwrap_or_else(|_| Rational::zero());
            let b = rhs.coeff(n).unwrap_or_else(|_| Rational::zero());
            coeffs.push(a + b);
        }
        LaurentSeries::new(lo, coeffs, prec)
    }
}

impl std::ops::Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prec: self.prec,
        }
    }
}

impl std::ops::Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        let prec = prec_shift(self.prec, rhs.val_bound()).min(prec_shift(rhs.prec, self.val_bound()));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LaurentSeries::zero(prec);
        }
        let lo = self.val + rhs.val;
        let hi = sat(lo, (self.coeffs.len() + rhs.coeffs.len()) as i64 - 1).min(prec);
        let n = (hi - lo).max(0) as usize;
        let mut coeffs = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= n {
                    break;
                }
                coeffs[k] = &coeffs[k] + &(a * b);
            }
        }
        LaurentSeries::new(lo, coeffs, prec)
    }
}

/// Evaluate a rational function of `y` at a Laurent series, e.g. `R(j(q))`.
/// The denominator must be nonzero to the working precision.
pub fn eval_ratfunc(f: &RatFunc, y: &LaurentSeries) -> Result<LaurentSeries> {
    let horner = |p: &crate::poly::Poly| -> LaurentSeries {
        let mut acc = LaurentSeries::zero(EXACT);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * y) + &LaurentSeries::constant(c.clone());
        }
        acc
    };
    let num = horner(f.num());
    let den = horner(f.den());
    Ok(&num * &den.inverse()?)
}

impl std::fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = self.val + i as i64;
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            if !mag.is_one() || n == 0 {
                f.write_str(&format_rational(&mag))?;
                if n != 0 {
                    f.write_str("*")?;
                }
            }
            match n {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        if self.prec != EXACT {
            write!(f, " + O(q^{})", self.prec)?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LaurentSeries({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rational::{rat, rat_i};

    fn series_ints(val: i64, coeffs: &[i64], prec: i64) -> LaurentSeries {
        LaurentSeries::new(val, coeffs.iter().map(|&c| rat_i(c)).collect(), prec)
    }

    #[test]
    fn normalization_and_coeff_access() {
        let s = series_ints(-1, &[0, 3, 0, 5], 10);
        assert_eq!(s.valuation(), Some(0));
        assert_eq!(s.coeff(0).unwrap(), rat_i(3));
        assert_eq!(s.coeff(1).unwrap(), rat_i(0));
        assert_eq!(s.coeff(2).unwrap(), rat_i(5));
        assert_eq!(s.coeff(9).unwrap(), rat_i(0));
        assert!(matches!(s.coeff(10), Err(Error::PrecisionTooSmall { .. })));
    }

    #[test]
    fn geometric_series_inverse() {
        // 1/(1 - q) = 1 + q + q^2 + ...
        let f = series_ints(0, &[1, -1], EXACT);
        let inv = f.inverse().unwrap();
        for n in 0..20 {
            assert_eq!(inv.coeff(n).unwrap(), rat_i(1));
        }
        // Verify f * inv = 1 to the inverse's horizon.
        let prod = &f * &inv;
        assert_eq!(prod.coeff(0).unwrap(), rat_i(1));
        for n in 1..20 {
            assert_eq!(prod.coeff(n).unwrap(), rat_i(0));
        }
    }

    #[test]
    fn inverse_precision_rule() {
        // f = q (1 + q) known mod q^10: 1/f known mod q^8 = q^(10 - 2).
        let f = series_ints(1, &[1, 1], 10);
        let inv = f.inverse().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.precision(), 8);
        // And the product is 1 to that horizon.
        let prod = &f * &inv;
        for n in 1..8 {
            assert_eq!(prod.coeff(n).unwrap(), rat_i(0), "at q^{n}");
        }
    }

    #[test]
    fn multiplication_precision_rule() {
        // (a + O(q^5)) * (q^2 + O(q^7)) is known mod q^7.
        let a = series_ints(0, &[1, 1], 5);
        let b = series_ints(2, &[1], 7);
        assert_eq!((&a * &b).precision(), 7);
    }

    #[test]
    fn composition_fibonacci() {
        // 1/(1 - x) composed with q + q^2 gives sum F_(n+1) q^n.
        let f = series_ints(0, &[1, -1], EXACT).inverse().unwrap().truncate(12);
        let g = series_ints(1, &[1, 1], EXACT);
        let h = f.compose(&g).unwrap();
        let fib = [1i64, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (n, &expect) in fib.iter().enumerate() {
            assert_eq!(h.coeff(n as i64).unwrap(), rat_i(expect), "at q^{n}");
        }
    }

    #[test]
    fn compose_with_laurent_head() {
        // f = x^-1 + x composed with g = 2q: (1/2) q^-1 + 2q.
        let f = series_ints(-1, &[1, 0, 1], EXACT);
        let g = series_ints(1, &[2], EXACT);
        let h = f.compose(&g).unwrap();
        assert_eq!(h.coeff(-1).unwrap(), rat(1, 2));
        assert_eq!(h.coeff(1).unwrap(), rat_i(2));
    }

    #[test]
    fn d_log_operator() {
        let s = series_ints(-1, &[5, 7, 11], 20); // 5q^-1 + 7 + 11q
        let d = s.d_log();
        assert_eq!(d.coeff(-1).unwrap(), rat_i(-5));
        assert_eq!(d.coeff(0).unwrap(), rat_i(0));
        assert_eq!(d.coeff(1).unwrap(), rat_i(11));
    }

    #[test]
    fn plain_derivative() {
        // d/dq (q^-1 + 3q^2) = -q^-2 + 6q.
        let s = series_ints(-1, &[1, 0, 0, 3], 10);
        let d = s.derivative();
        assert_eq!(d.coeff(-2).unwrap(), rat_i(-1));
        assert_eq!(d.coeff(1).unwrap(), rat_i(6));
        assert_eq!(d.precision(), 9);
        assert!(LaurentSeries::constant(rat_i(4)).derivative().is_zero());
    }

    #[test]
    fn ratfunc_evaluation_at_series() {
        // 1/y at y = q^-1 + 744 + ...: leading term q, then -744 q^2.
        let y = series_ints(-1, &[1, 744, 196884], 3);
        let f = RatFunc::new(Poly::one(), Poly::y()).unwrap();
        let s = eval_ratfunc(&f, &y).unwrap();
        assert_eq!(s.coeff(1).unwrap(), rat_i(1));
        assert_eq!(s.coeff(2).unwrap(), rat_i(-744));
        // Constant rational functions stay constant.
        let c = RatFunc::from_rational(rat(3, 2));
        let s = eval_ratfunc(&c, &y).unwrap();
        assert_eq!(s.coeff(0).unwrap(), rat(3, 2));
    }

    #[test]
    fn pow_including_negative() {
        let s = series_ints(1, &[1, 1], 12); // q + q^2
        let cube = s.pow(3).unwrap();
        assert_eq!(cube.coeff(3).unwrap(), rat_i(1));
        assert_eq!(cube.coeff(4).unwrap(), rat_i(3));
        let back = &cube * &s.pow(-3).unwrap();
        assert_eq!(back.coeff(0).unwrap(), rat_i(1));
    }
}
