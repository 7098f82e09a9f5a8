//! Exact q-expansion engine: the classical j series, Schwarzian verification
//! in the D = q d/dq calculus, and modular polynomials of levels 2 and 3.
//!
//! Everything in this module is integer or rational arithmetic on truncated
//! Laurent series; no floating point enters anywhere. The j series is built
//! from E4^3 / Delta with both factors expanded exactly, so its landmark
//! coefficients (744, 196884, ...) are outputs, never inputs. Modular
//! polynomials are obtained by solving the integer linear system forced by
//! Phi(j(q), j(q^N)) = 0 and are cross-checked against the Kronecker
//! congruences in the tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::ratfunc::RatFunc;
use crate::rational::{format_rational, rat, Rational};
use crate::series::{eval_ratfunc, LaurentSeries};
use crate::{Error, Result};

/// Role alias: Laurent expansions in the nome q. The classical j has
/// valuation -1 and integer coefficients.
pub type LaurentQSeries = LaurentSeries;

/// sigma_3 sieve: sums[n] = sum of d^3 over divisors d of n, for n < len.
fn sigma3_table(len: usize) -> Vec<i64> {
    let mut sums = vec![0i64; len];
    for d in 1..len {
        let cube = (d * d * d) as i64;
        let mut m = d;
        while m < len {
            sums[m] += cube;
            m += d;
        }
    }
    sums
}

/// Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n, known through q^(prec-1).
fn eisenstein4(prec: i64) -> LaurentSeries {
    let len = prec.max(1) as usize;
    let sums = sigma3_table(len);
    let mut coeffs = Vec::with_capacity(len);
    coeffs.push(Rational::one());
    for s in sums.iter().skip(1) {
        coeffs.push(Rational::from_integer(BigInt::from(240 * s)));
    }
    LaurentSeries::new(0, coeffs, prec)
}

/// Euler's product prod (1 - q^n) expanded by the pentagonal number theorem.
fn euler_product(prec: i64) -> LaurentSeries {
    let len = prec.max(1) as usize;
    let mut coeffs = vec![Rational::zero(); len];
    coeffs[0] = Rational::one();
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 >= prec {
            break;
        }
        let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        coeffs[e1 as usize] = sign.clone();
        if e2 < prec {
            coeffs[e2 as usize] = sign;
        }
        k += 1;
    }
    LaurentSeries::new(0, coeffs, prec)
}

/// Delta = q prod (1 - q^n)^24, the weight-12 cusp form, valuation 1.
fn discriminant_series(prec: i64) -> Result<LaurentSeries> {
    let phi24 = euler_product(prec).pow(24)?;
    Ok(&LaurentSeries::q_power(1) * &phi24)
}

/// The classical modular j-function as an exact q-expansion through q^order:
/// j = E4^3 / Delta = q^-1 + 744 + 196884 q + ...
pub fn j_series(order: i64) -> Result<LaurentSeries> {
    if order < 2 {
        return Err(Error::Invalid(format!(
            "j series truncation order must be at least 2, got {order}"
        )));
    }
    let work = order + 4;
    let e4 = eisenstein4(work);
    let delta = discriminant_series(work)?;
    let j = &e4.pow(3)? * &delta.inverse()?;
    Ok(j.truncate(order + 1))
}

/// Outcome of an exact coefficientwise identity check up to a stated order.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidualReport {
    /// Every known coefficient through the stated order vanishes.
    ZeroThrough { order: i64 },
    /// The first nonzero coefficient, which refutes the identity.
    FirstNonzero { order: i64, coefficient: Rational },
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        matches!(self, ResidualReport::ZeroThrough { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ResidualReport::ZeroThrough { order } => serde_json::json!({
                "status": "zero",
                "through_order": order,
            }),
            ResidualReport::FirstNonzero { order, coefficient } => serde_json::json!({
                "status": "nonzero",
                "first_order": order,
                "coefficient": format_rational(coefficient),
            }),
        }
    }
}

impl std::fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResidualReport::ZeroThrough { order } => write!(f, "zero through order {order}"),
            ResidualReport::FirstNonzero { order, coefficient } => {
                write!(f, "nonzero at order {order}: coefficient {}", format_rational(coefficient))
            }
        }
    }
}

/// First nonzero coefficient of `s` at exponent <= order, or zero-through.
/// Errors when the series is not known that far.
fn first_nonzero(s: &LaurentSeries, order: i64) -> Result<ResidualReport> {
    if s.precision() <= order {
        return Err(Error::PrecisionTooSmall { needed: order + 1, have: s.precision() });
    }
    let lo = s.valuation().unwrap_or(order + 1).min(order + 1);
    if let Some((n, c)) = s.terms(lo, order + 1)?.into_iter().next() {
        return Ok(ResidualReport::FirstNonzero { order: n, coefficient: c });
    }
    Ok(ResidualReport::ZeroThrough { order })
}

/// Check the Schwarzian equation S(y) + (1/2)(y')^2 R(y) = 0 on a
/// q-expansion. With D = q d/dq the (2 pi i)^2 factors cancel and clearing
/// denominators by (Dy)^2 leaves the polynomial identity
/// `D^3 y * D y - (3/2)(D^2 y)^2 + (1/2)(D y)^4 R(y) = 0`,
/// which is tested coefficient by coefficient through `order`.
pub fn verify_schwarzian_q(r: &RatFunc, y: &LaurentSeries, order: i64) -> Result<ResidualReport> {
    let dy = y.d_log();
    let d2y = dy.d_log();
    let d3y = d2y.d_log();
    let lead = &d3y * &dy;
    let mid = (&d2y * &d2y).scale(&rat(3, 2));
    let sq = &dy * &dy;
    let quart = &sq * &sq;
    let ry = eval_ratfunc(r, y)?;
    let tail = (&quart * &ry).scale(&rat(1, 2));
    let residual = &(&lead - &mid) + &tail;
    first_nonzero(&residual, order)
}

/// Degree of the level-N modular polynomial in each variable: the index
/// psi(N) = N prod_{p | N} (1 + 1/p). Only the desk-scale levels 2 and 3 are
/// supported.
fn psi_index(level: u32) -> Result<usize> {
    match level {
        2 => Ok(3),
        3 => Ok(4),
        _ => Err(Error::Unsupported(format!(
            "special polynomials are computed for levels 2 and 3 only, got {level}"
        ))),
    }
}

/// Bivariate integer polynomial Phi_N(X, Y) with Phi_N(j(q), j(q^N)) = 0,
/// symmetric in X and Y, content 1, degree psi(N) in each variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialPoly {
    level: u32,
    /// coeffs[a][b] is the coefficient of X^a Y^b; square grid of side
    /// degree + 1.
    coeffs: Vec<Vec<BigInt>>,
}

impl SpecialPoly {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Degree in each variable.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, a: usize, b: usize) -> BigInt {
        self.coeffs
            .get(a)
            .and_then(|row| row.get(b))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.degree();
        (0..=d).all(|a| (0..=d).all(|b| self.coeffs[a][b] == self.coeffs[b][a]))
    }

    /// Gcd of all coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for row in &self.coeffs {
            for c in row {
                g = g.gcd(c);
            }
        }
        g
    }

    /// Phi(x, y) for series arguments, exact through the available precision.
    pub fn evaluate(&self, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
        let d = self.degree();
        let mut acc = LaurentSeries::zero(crate::series::EXACT);
        for a in (0..=d).rev() {
            let mut inner = LaurentSeries::zero(crate::series::EXACT);
            for b in (0..=d).rev() {
                let c = LaurentSeries::constant(Rational::from_integer(self.coeffs[a][b].clone()));
                inner = &(&inner * y) + &c;
            }
            acc = &(&acc * x) + &inner;
        }
        acc
    }

    /// Canonical plain-text form: terms in descending lexicographic order of
    /// (X-exponent, Y-exponent). This is the byte-exact golden-file format.
    pub fn to_plain_text(&self) -> String {
        let d = self.degree();
        let mut out = String::new();
        for a in (0..=d).rev() {
            for b in (0..=d).rev() {
                let c = &self.coeffs[a][b];
                if c.is_zero() {
                    continue;
                }
                if out.is_empty() {
                    if c.is_negative() {
                        out.push('-');
                    }
                } else {
                    out.push_str(if c.is_negative() { " - " } else { " + " });
                }
                let mag = c.magnitude().to_string();
                let mono = monomial_text(a, b);
                if mono.is_empty() {
                    out.push_str(&mag);
                } else if mag == "1" {
                    out.push_str(&mono);
                } else {
                    out.push_str(&mag);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// JSON with integer coefficients as decimal strings, terms in the same
    /// order as the plain-text form.
    pub fn to_json(&self) -> serde_json::Value {
        let d = self.degree();
        let mut terms = Vec::new();
        for a in (0..=d).rev() {
            for b in (0..=d).rev() {
                let c = &self.coeffs[a][b];
                if !c.is_zero() {
                    terms.push(serde_json::json!({
                        "x": a,
                        "y": b,
                        "coefficient": c.to_string(),
                    }));
                }
            }
        }
        serde_json::json!({
            "level": self.level,
            "degree": self.degree(),
            "terms": terms,
        })
    }
}

impl serde::Serialize for SpecialPoly {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

fn monomial_text(a: usize, b: usize) -> String {
    let var = |name: &str, e: usize| match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    };
    let x = var("X", a);
    let y = var("Y", b);
    match (x.is_empty(), y.is_empty()) {
        (true, true) => String::new(),
        (false, true) => x,
        (true, false) => y,
        (false, false) => format!("{x}*{y}"),
    }
}

/// Compute Phi_N for N in {2, 3} by solving the linear system that forces
/// Phi(j(q), j(q^N)) = 0 through `truncation`. The ansatz is the full
/// symmetric bivariate space of degree psi(N) in each variable; the kernel
/// must be one-dimensional, and the generator is scaled to integer content 1
/// with the X^psi coefficient positive.
pub fn compute_special_poly(level: u32, truncation: i64) -> Result<SpecialPoly> {
    let psi = psi_index(level)?;
    let depth = (psi as i64) * (1 + level as i64);
    // Unknowns: one per unordered exponent pair (a, b), a >= b.
    let pairs: Vec<(usize, usize)> =
        (0..=psi).flat_map(|a| (0..=a).map(move |b| (a, b))).collect();
    let lo = -depth;
    let equations = truncation - lo + 1;
    if equations <= pairs.len() as i64 {
        return Err(Error::Invalid(format!(
            "truncation {truncation} yields {equations} equations for {} unknowns; \
             the system must be overdetermined",
            pairs.len()
        )));
    }
    let j = j_series(truncation + depth + 2)?;
    let jn = j.compose(&LaurentSeries::q_power(level as i64))?;
    let mut jp = vec![LaurentSeries::constant(Rational::one())];
    let mut jnp = jp.clone();
    for a in 1..=psi {
        jp.push(&jp[a - 1] * &j);
        jnp.push(&jnp[a - 1] * &jn);
    }
    let basis: Vec<LaurentSeries> = pairs
        .iter()
        .map(|&(a, b)| {
            let m = &jp[a] * &jnp[b];
            if a == b {
                m
            } else {
                &m + &(&jp[b] * &jnp[a])
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(equations as usize);
    for n in lo..=truncation {
        rows.push(basis.iter().map(|s| s.coeff(n)).collect::<Result<Vec<_>>>()?);
    }
    let kernel = linalg::nullspace(&rows)?;
    let v = match kernel.len() {
        1 => &kernel[0],
        0 => {
            return Err(Error::Invalid(
                "no modular relation in the ansatz space: the kernel is trivial".into(),
            ))
        }
        k => {
            return Err(Error::Invalid(format!(
                "truncation {truncation} leaves the special-polynomial system \
                 underdetermined (kernel dimension {k})"
            )))
        }
    };
    // Clear denominators, strip the content, and fix the sign convention.
    let mut den_lcm = BigInt::one();
    for c in v {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer())
        .collect();
    let mut content = BigInt::zero();
    for c in &scaled {
        content = content.gcd(c);
    }
    if content.is_zero() {
        return Err(Error::Invalid("kernel vector is zero".into()));
    }
    let mut ints: Vec<BigInt> = scaled.iter().map(|c| c / &content).collect();
    let lead = pairs.iter().position(|&(a, b)| a == psi && b == 0).expect("lead pair");
    if ints[lead].is_negative() {
        for c in &mut ints {
            *c = -c.clone();
        }
    }
    let mut grid = vec![vec![BigInt::zero(); psi + 1]; psi + 1];
    for (&(a, b), c) in pairs.iter().zip(&ints) {
        grid[a][b] = c.clone();
        grid[b][a] = c.clone();
    }
    Ok(SpecialPoly { level, coeffs: grid })
}

/// Substitute (j(q), j(q^N)) into Phi and scan the residual through `order`.
pub fn verify_special_poly(phi: &SpecialPoly, level: u32, order: i64) -> Result<ResidualReport> {
    if phi.level != level {
        return Err(Error::Invalid(format!(
            "polynomial has level {}, asked to verify at level {level}",
            phi.level
        )));
    }
    let depth = phi.degree() as i64 * (1 + level as i64);
    let j = j_series(order + depth + 2)?;
    let jn = j.compose(&LaurentSeries::q_power(level as i64))?;
    let residual = phi.evaluate(&j, &jn);
    first_nonzero(&residual, order)
}
