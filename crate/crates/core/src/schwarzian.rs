//! Construction and calculus of Schwarzian equations for genus-zero
//! uniformizers.
//!
//! Throughout, an equation means `S(y) + (1/2) (y')^2 R(y) = 0` where `S` is
//! the Schwarzian derivative and `R` the rational function determined by the
//! singular points, the cone angles, and the accessory parameters:
//!
//! ```text
//! R(y) = sum_i (1 - a_i^2) / (y - p_i)^2  +  sum_i A_i / (y - p_i)
//! ```
//!
//! over the finite singular points `p_i` with angle parameters `a_i` (`1/n`
//! at a cone point of order `n`, `0` at a cusp). A singular point at infinity
//! contributes no explicit term; it is encoded by the decay conditions on the
//! `A_i`. With this normalization the second-order reduction is
//! `z'' = r(y) z` with `r = -R/4`, which makes the local exponent difference
//! at each singular point equal to its angle parameter.

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{format_rational, parse_rational, rat, rat_i, Location, Rational};
use crate::series::{eval_ratfunc, LaurentSeries};
use crate::{Error, Result};

/// Order of a singular point: a cone point of finite order `>= 2` or a cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u64),
    Infinity,
}

impl Order {
    /// The angle parameter `1/n` (`0` for a cusp).
    pub fn angle(&self) -> Rational {
        match self {
            Order::Finite(n) => rat(1, *n as i64),
            Order::Infinity => Rational::zero(),
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, Order::Infinity)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "oo" {
            return Ok(Order::Infinity);
        }
        let n: u64 = s
            .parse()
            .map_err(|_| Error::Parse { what: "order".into(), input: s.into() })?;
        if n < 2 {
            return Err(Error::InvalidSignature);
        }
        Ok(Order::Finite(n))
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

/// Point orders `(m_1, ..., m_r)` of a genus-zero group, `r >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    orders: Vec<Order>,
}

impl Signature {
    pub fn new(orders: Vec<Order>) -> Result<Self> {
        if orders.len() < 3 {
            return Err(Error::InvalidSignature);
        }
        if orders.iter().any(|o| matches!(o, Order::Finite(n) if *n < 2)) {
            return Err(Error::InvalidSignature);
        }
        Ok(Signature { orders })
    }

    pub fn triangle(k: Order, l: Order, m: Order) -> Result<Self> {
        Signature::new(vec![k, l, m])
    }

    /// Parses comma-separated orders, e.g. `2,3,inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let orders = s.split(',').map(Order::parse).collect::<Result<Vec<_>>>()?;
        Signature::new(orders)
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn is_triangle(&self) -> bool {
        self.orders.len() == 3
    }

    /// `sum 1/m_i` over the three orders of a triangle signature.
    pub fn triangle_angle_sum(&self) -> Result<Rational> {
        if !self.is_triangle() {
            return Err(Error::InvalidSignature);
        }
        Ok(self.orders.iter().map(Order::angle).fold(Rational::zero(), |s, a| s + a))
    }

    /// `1/k + 1/l + 1/m < 1`, the condition for a hyperbolic triangle.
    pub fn is_hyperbolic_triangle(&self) -> bool {
        self.is_triangle()
            && self.triangle_angle_sum().map(|s| s < Rational::one()).unwrap_or(false)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Hypergeometric-style parameters of a triangle signature `(k, l, m)`:
/// `lambda = 1/l`, `mu = 1/k`, `nu = 1/m`, and the exponent data
/// `alpha = (1-lambda-mu+nu)/2`, `beta = (1-lambda-mu-nu)/2`,
/// `gamma = 1-lambda` (so that `lambda = 1-gamma`, `mu = gamma-alpha-beta`,
/// `nu = alpha-beta`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleParams {
    pub lambda: Rational,
    pub mu: Rational,
    pub nu: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl TriangleParams {
    pub fn from_signature(sig: &Signature) -> Result<Self> {
        if !sig.is_hyperbolic_triangle() {
            return Err(Error::NotHyperbolic);
        }
        let k = sig.orders()[0].angle();
        let l = sig.orders()[1].angle();
        let m = sig.orders()[2].angle();
        Ok(TriangleParams::from_exponents(l, k, m))
    }

    /// Direct construction from `(lambda, mu, nu)`; no hyperbolicity check,
    /// so synthetic parameter triples can be probed.
    pub fn from_exponents(lambda: Rational, mu: Rational, nu: Rational) -> Self {
        let half = rat(1, 2);
        let alpha = (Rational::one() - &lambda - &mu + &nu) * &half;
        let beta = (Rational::one() - &lambda - &mu - &nu) * &half;
        let gamma = Rational::one() - &lambda;
        TriangleParams { lambda, mu, nu, alpha, beta, gamma }
    }
}

/// The three-term closed form for a triangle equation with angle parameters
/// `a0` at `y = 0`, `a1` at `y = 1`, `ainf` at infinity:
/// `(1-a0^2)/y^2 + (1-a1^2)/(y-1)^2 + (a0^2+a1^2-ainf^2-1)/(y(y-1))`.
pub fn three_point_r(a0: &Rational, a1: &Rational, ainf: &Rational) -> RatFunc {
    let one = Rational::one();
    let w0 = &one - &(a0 * a0);
    let w1 = &one - &(a1 * a1);
    let c = a0 * a0 + a1 * a1 - ainf * ainf - &one;
    let y = Poly::y();
    let ym1 = Poly::from_ints(&[-1, 1]);
    let t0 = RatFunc::new(Poly::constant(w0), y.pow(2)).expect("nonzero");
    let t1 = RatFunc::new(Poly::constant(w1), ym1.pow(2)).expect("nonzero");
    let tc = RatFunc::new(Poly::constant(c), &y * &ym1).expect("nonzero");
    &(&t0 + &t1) + &tc
}

/// `R` for a hyperbolic triangle signature `(k, l, m)`, with the order-`l`
/// point at `y = 0`, the order-`k` point at `y = 1`, and the order-`m` point
/// at infinity.
pub fn triangle_r(sig: &Signature) -> Result<RatFunc> {
    if !sig.is_triangle() {
        return Err(Error::InvalidSignature);
    }
    if !sig.is_hyperbolic_triangle() {
        return Err(Error::NotHyperbolic);
    }
    let k = sig.orders()[0].angle();
    let l = sig.orders()[1].angle();
    let m = sig.orders()[2].angle();
    Ok(three_point_r(&l, &k, &m))
}

/// `R` for the classical modular `j`-function:
/// `(y^2 - 1968 y + 2654208) / (y^2 (y - 1728)^2)`.
pub fn classical_j_r() -> RatFunc {
    let num = Poly::from_ints(&[2654208, -1968, 1]);
    let den = &Poly::y().pow(2) * &Poly::from_ints(&[-1728, 1]).pow(2);
    RatFunc::new(num, den).expect("nonzero denominator")
}

/// Transformation of `R` under rescaling the uniformizer: if `J = c h` then
/// `R_J(y) = R_h(y/c) / c^2`.
pub fn rescale_hauptmodul(r: &RatFunc, c: &Rational) -> Result<RatFunc> {
    if c.is_zero() {
        return Err(Error::Invalid("rescale by zero".into()));
    }
    let cinv = c.recip();
    Ok(r.scale_var(&cinv)?.scale(&(&cinv * &cinv)))
}

/// Normal-form coefficient `r = -R/4` for a second-order equation
/// `z'' = r z` whose exponent differences at `0, 1, infinity` are the given
/// values. Used to build test instances with prescribed local data, e.g.
/// spherical triples.
pub fn normal_form_from_exponent_differences(
    d0: &Rational,
    d1: &Rational,
    dinf: &Rational,
) -> RatFunc {
    three_point_r(d0, d1, dinf).scale(&rat(-1, 4))
}

/// Solves the decay conditions at infinity for the accessory parameters.
///
/// `points` and `angles` are aligned; the returned vector is aligned with the
/// finite points in order. Three singular points determine the accessories
/// uniquely; more leave free parameters and yield `Underdetermined`.
pub fn derive_accessory(points: &[Location], angles: &[Rational]) -> Result<Vec<Rational>> {
    let (matrix, rhs) = accessory_constraints(points, angles)?;
    if !linalg::nullspace(&matrix)?.is_empty() {
        return Err(Error::Underdetermined);
    }
    linalg::solve(&matrix, &rhs)?.ok_or(Error::AccessoryConstraint)
}

/// Checks a user-supplied accessory vector against the decay conditions.
pub fn validate_accessory(
    points: &[Location],
    angles: &[Rational],
    accessory: &[Rational],
) -> Result<()> {
    let (matrix, rhs) = accessory_constraints(points, angles)?;
    if accessory.len() != matrix.first().map_or(0, |r| r.len()) {
        return Err(Error::AccessoryConstraint);
    }
    for (row, want) in matrix.iter().zip(&rhs) {
        let got: Rational =
            row.iter().zip(accessory).map(|(m, a)| m * a).fold(Rational::zero(), |s, t| s + t);
        if &got != want {
            return Err(Error::AccessoryConstraint);
        }
    }
    Ok(())
}

/// Linear system rows for the accessories: coefficients of the `1/y` (and,
/// when infinity is regular, `1/y^2` and `1/y^3`) terms of `R` at infinity.
fn accessory_constraints(
    points: &[Location],
    angles: &[Rational],
) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    if points.len() != angles.len() {
        return Err(Error::InvalidEquation);
    }
    let mut finite = vec![];
    let mut infinity_angle: Option<Rational> = None;
    for (p, a) in points.iter().zip(angles) {
        match p {
            Location::Finite(x) => finite.push((x.clone(), a.clone())),
            Location::Infinity => {
                if infinity_angle.replace(a.clone()).is_some() {
                    return Err(Error::InvalidEquation);
                }
            }
        }
    }
    let one = Rational::one();
    let weight_sum: Rational =
        finite.iter().map(|(_, a)| &one - &(a * a)).fold(Rational::zero(), |s, t| s + t);
    let weighted_point_sum: Rational = finite
        .iter()
        .map(|(p, a)| (&one - &(a * a)) * p)
        .fold(Rational::zero(), |s, t| s + t);

    let row_ones: Vec<Rational> = finite.iter().map(|_| one.clone()).collect();
    let row_points: Vec<Rational> = finite.iter().map(|(p, _)| p.clone()).collect();
    let mut matrix = vec![row_ones, row_points];
    let mut rhs = vec![Rational::zero()];
    match infinity_angle {
        Some(ai) => {
            // R ~ (1 - ai^2)/y^2 + O(1/y^3).
            rhs.push(&one - &(&ai * &ai) - weight_sum);
        }
        None => {
            // Infinity regular: R = O(1/y^4).
            rhs.push(-weight_sum);
            matrix.push(finite.iter().map(|(p, _)| p * p).collect());
            rhs.push(weighted_point_sum.clone() * rat_i(-2));
        }
    }
    Ok((matrix, rhs))
}

/// A Schwarzian equation: singular points, angle parameters, accessory
/// parameters at the finite points, and the resulting `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchwarzianEquation {
    points: Vec<Location>,
    angles: Vec<Rational>,
    accessory: Vec<Rational>,
    r: RatFunc,
}

impl SchwarzianEquation {
    /// Builds the equation from the singular data. With three points the
    /// accessories are derived; with more they must be supplied and are
    /// validated against the decay conditions at infinity.
    pub fn new(
        points: Vec<Location>,
        angles: Vec<Rational>,
        accessory: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if points.len() < 3 || points.len() != angles.len() {
            return Err(Error::InvalidEquation);
        }
        for (i, p) in points.iter().enumerate() {
            if points[i + 1..].contains(p) {
                return Err(Error::InvalidEquation);
            }
        }
        for a in &angles {
            if a.is_negative() || a >= &Rational::one() {
                return Err(Error::InvalidEquation);
            }
        }
        let accessory = match accessory {
            Some(acc) => {
                validate_accessory(&points, &angles, &acc)?;
                acc
            }
            None => derive_accessory(&points, &angles)?,
        };
        let r = assemble_r(&points, &angles, &accessory);
        Ok(SchwarzianEquation { points, angles, accessory, r })
    }

    /// Triangle equation at `(0, 1, infinity)` for signature `(k, l, m)`:
    /// order `l` at `0`, `k` at `1`, `m` at infinity. The accessories are
    /// derived, not read off the closed form, so this construction and
    /// `triangle_r` check each other.
    pub fn triangle(sig: &Signature) -> Result<Self> {
        if !sig.is_triangle() {
            return Err(Error::InvalidSignature);
        }
        if !sig.is_hyperbolic_triangle() {
            return Err(Error::NotHyperbolic);
        }
        let k = sig.orders()[0].angle();
        let l = sig.orders()[1].angle();
        let m = sig.orders()[2].angle();
        SchwarzianEquation::new(
            vec![Location::finite_i(0), Location::finite_i(1), Location::Infinity],
            vec![l, k, m],
            None,
        )
    }

    /// The equation of the classical `j`-function: order 3 at `0`, order 2 at
    /// `1728`, cusp at infinity.
    pub fn classical_j() -> Self {
        SchwarzianEquation::new(
            vec![Location::finite_i(0), Location::finite_i(1728), Location::Infinity],
            vec![rat(1, 3), rat(1, 2), Rational::zero()],
            None,
        )
        .expect("classical j data is consistent")
    }

    pub fn points(&self) -> &[Location] {
        &self.points
    }

    pub fn angles(&self) -> &[Rational] {
        &self.angles
    }

    /// Accessory parameters, aligned with the finite points in order.
    pub fn accessory(&self) -> &[Rational] {
        &self.accessory
    }

    pub fn r(&self) -> &RatFunc {
        &self.r
    }

    pub fn has_infinite_point(&self) -> bool {
        self.points.iter().any(Location::is_infinite)
    }

    /// Coefficient `r = -R/4` of the second-order reduction `z'' = r z`.
    pub fn to_normal_form(&self) -> RatFunc {
        self.r.scale(&rat(-1, 4))
    }

    /// Constant term `-r = R/4` of the attached Riccati equation
    /// `du/dy + u^2 + (R/4) = 0`, whose solutions are `u = z'/z` for
    /// solutions `z` of the normal form.
    pub fn to_riccati(&self) -> RatFunc {
        self.r.scale(&rat(1, 4))
    }

    /// Clears the equation to a differential polynomial with integer
    /// coefficients.
    pub fn cleared_polynomial_form(&self) -> ClearedForm {
        ClearedForm::from_r(&self.r, self.has_infinite_point())
    }
}

fn assemble_r(points: &[Location], angles: &[Rational], accessory: &[Rational]) -> RatFunc {
    let one = Rational::one();
    let mut acc = RatFunc::zero();
    let mut k = 0usize;
    for (p, a) in points.iter().zip(angles) {
        let Location::Finite(x) = p else { continue };
        let w = &one - &(a * a);
        let lin = Poly::linear_root(x);
        let t2 = RatFunc::new(Poly::constant(w), lin.pow(2)).expect("nonzero");
        let t1 = RatFunc::new(Poly::constant(accessory[k].clone()), lin).expect("nonzero");
        acc = &(&acc + &t2) + &t1;
        k += 1;
    }
    acc
}

/// The equation multiplied out to `a(y) y''' y' + b(y) y''^2 + c(y) y'^4 = 0`
/// with integer-coefficient polynomials of content one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClearedForm {
    /// Coefficient of `y''' y'`.
    pub a: Poly,
    /// Coefficient of `y''^2`.
    pub b: Poly,
    /// Coefficient of `y'^4`.
    pub c: Poly,
    /// Total degree counting each jet factor once and the coefficient degree
    /// in `y`, projectively corrected (+2) when infinity is singular.
    pub total_degree: usize,
}

impl ClearedForm {
    /// From `S(y) + (1/2)(y')^2 R = 0`: multiply by `2 (y')^2 den(R)` to get
    /// `2 den R_den-cleared`... concretely `a = 2 den(R)`, `b = -3 den(R)`,
    /// `c = num(R)`, then scale to integer content one.
    pub fn from_r(r: &RatFunc, infinity_singular: bool) -> ClearedForm {
        let a = r.den().scale(&rat_i(2));
        let b = r.den().scale(&rat_i(-3));
        let c = r.num().clone();
        let (a, b, c) = clear_to_integers(a, b, c);
        let literal = (a.deg() + 2).max(b.deg() + 2).max(c.deg() + 4);
        let total_degree = literal + if infinity_singular { 2 } else { 0 };
        ClearedForm { a, b, c, total_degree }
    }

    /// Evaluates the cleared form on the jet of a series in the scaled
    /// derivative `D = q d/dq` (the chart factor common to all three terms
    /// cancels): `a(y) D3y Dy + b(y) (D2y)^2 + c(y) (Dy)^4`.
    pub fn residual_on_jet(&self, y: &LaurentSeries) -> Result<LaurentSeries> {
        let dy = y.d_log();
        let d2y = dy.d_log();
        let d3y = d2y.d_log();
        let at = |p: &Poly| eval_ratfunc(&RatFunc::from_poly(p.clone()), y);
        let t1 = &at(&self.a)? * &(&d3y * &dy);
        let t2 = &at(&self.b)? * &(&d2y * &d2y);
        let t3 = &at(&self.c)? * &dy.pow(4)?;
        Ok(&(&t1 + &t2) + &t3)
    }
}

impl std::fmt::Display for ClearedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})*y'''*y' + ({})*y''^2 + ({})*y'^4",
            self.a, self.b, self.c
        )
    }
}

/// Scales three polynomials by one rational so all coefficients become
/// integers with overall content one (sign fixed by `a`'s leading term).
fn clear_to_integers(a: Poly, b: Poly, c: Poly) -> (Poly, Poly, Poly) {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for p in [&a, &b, &c] {
        for coef in p.coeffs() {
            den_lcm = den_lcm.lcm(coef.denom());
        }
    }
    let scaled: Vec<Poly> =
        [&a, &b, &c].iter().map(|p| p.scale(&Rational::from_integer(den_lcm.clone()))).collect();
    for p in &scaled {
        for coef in p.coeffs() {
            num_gcd = num_gcd.gcd(coef.numer());
        }
    }
    if num_gcd.is_zero() {
        num_gcd = BigInt::one();
    }
    if scaled[0].leading().is_negative() {
        num_gcd = -num_gcd;
    }
    let inv = Rational::new(BigInt::one(), num_gcd);
    (scaled[0].scale(&inv), scaled[1].scale(&inv), scaled[2].scale(&inv))
}

/// Schwarzian derivative of a series via the logarithmic derivative:
/// `S(f) = u' - u^2/2` with `u = f''/f'`.
pub fn schwarzian_via_log_derivative(f: &LaurentSeries) -> Result<LaurentSeries> {
    let f1 = f.derivative();
    if f1.is_zero() {
        return Err(Error::SeriesUndefined);
    }
    let u = &f1.derivative() * &f1.inverse()?;
    Ok(&u.derivative() - &u.pow(2)?.scale(&rat(1, 2)))
}

/// Schwarzian derivative via third-order jets:
/// `S(f) = f'''/f' - (3/2)(f''/f')^2`.
pub fn schwarzian_via_jets(f: &LaurentSeries) -> Result<LaurentSeries> {
    let f1 = f.derivative();
    if f1.is_zero() {
        return Err(Error::SeriesUndefined);
    }
    let f2 = f1.derivative();
    let f3 = f2.derivative();
    let inv = f1.inverse()?;
    let jet3 = &f3 * &inv;
    let jet2 = &f2 * &inv;
    Ok(&jet3 - &jet2.pow(2)?.scale(&rat(3, 2)))
}

/// Schwarzian derivative of a truncated series (log-derivative form; the jet
/// form is exposed separately so the two can be compared term by term).
pub fn schwarzian_of_series(f: &LaurentSeries) -> Result<LaurentSeries> {
    schwarzian_via_log_derivative(f)
}

/// Expansion of the Moebius map `t -> (a t + b)/(c t + d)` about `t = 0`,
/// truncated at the given order. Requires `ad - bc != 0`.
pub fn mobius_series(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    prec: i64,
) -> Result<LaurentSeries> {
    if (a * d - b * c).is_zero() {
        return Err(Error::Invalid("degenerate Moebius map".into()));
    }
    let num = LaurentSeries::new(0, vec![b.clone(), a.clone()], crate::series::EXACT);
    let den = LaurentSeries::new(0, vec![d.clone(), c.clone()], crate::series::EXACT);
    Ok((&num * &den.inverse()?).truncate(prec))
}

#[derive(Serialize, Deserialize)]
struct EquationRepr {
    points: Vec<String>,
    angles: Vec<String>,
    accessory: Vec<String>,
    #[serde(rename = "R")]
    r: RatFunc,
}

impl Serialize for SchwarzianEquation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EquationRepr {
            points: self.points.iter().map(Location::render).collect(),
            angles: self.angles.iter().map(format_rational).collect(),
            accessory: self.accessory.iter().map(format_rational).collect(),
            r: self.r.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SchwarzianEquation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EquationRepr::deserialize(d)?;
        let points = repr
            .points
            .iter()
            .map(|s| Location::parse(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let angles = repr
            .angles
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let accessory = repr
            .accessory
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let eq = SchwarzianEquation::new(points, angles, Some(accessory))
            .map_err(D::Error::custom)?;
        if eq.r != repr.r {
            return Err(D::Error::custom("R does not match the singular data"));
        }
        Ok(eq)
    }
}

impl std::fmt::Display for SchwarzianEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pts: Vec<String> = self.points.iter().map(Location::render).collect();
        let angs: Vec<String> = self.angles.iter().map(format_rational).collect();
        write!(
            f,
            "points [{}], angles [{}], R = {}",
            pts.join(", "),
            angs.join(", "),
            self.r
        )
    }
}
