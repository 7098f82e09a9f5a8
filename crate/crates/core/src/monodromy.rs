//! Numerical monodromy of z'' = r(y) z along loops in the punctured plane.
//!
//! Conventions, fixed once for the whole module:
//! - every loop is based at a common base point and encircles its target
//!   counterclockwise exactly once;
//! - finite-point loops are ordered by decreasing argument of
//!   (point - base), which is left to right when the base sits below the
//!   points;
//! - the monodromy matrix of a loop is the end value of the fundamental
//!   matrix F with F(start) = I, so continuation along gamma then delta has
//!   matrix M_delta * M_gamma;
//! - the loop at infinity is the big circle through the base traversed
//!   clockwise in the chart (counterclockwise around infinity). With the
//!   ordering above, M_inf * M_1 * M_2 * ... * M_s = I is the defining
//!   relation of the punctured sphere, and its residual is what the report
//!   carries. The comparison allows an overall sign because only the
//!   projective statement is asserted.
//!
//! The integrator is a Dormand-Prince 5(4) pair on the first-order system
//! F' = (dy/ds) A(y(s)) F with A = [[0, 1], [r, 0]]. Away from the singular
//! points the system is not stiff; safety comes from the loops' clearance,
//! which also caps the step size. Loops are integrated independently of one
//! another (the work parallelizes trivially); the report is assembled as a
//! deterministic reduction over the loop order.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::kovacic::{classify_singularities, PointKind};
use crate::ratfunc::RatFunc;
use crate::rational::{rational_to_f64, Location, Rational};
use crate::schwarzian::Signature;
use crate::{Error, Result};

/// Dense 2x2 complex matrix in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2C {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Matrix2C {
    pub fn identity() -> Self {
        Matrix2C {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn mul(&self, rhs: &Matrix2C) -> Matrix2C {
        Matrix2C {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn scale(&self, s: Complex64) -> Matrix2C {
        Matrix2C { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn add(&self, rhs: &Matrix2C) -> Matrix2C {
        Matrix2C { a: self.a + rhs.a, b: self.b + rhs.b, c: self.c + rhs.c, d: self.d + rhs.d }
    }

    pub fn sub(&self, rhs: &Matrix2C) -> Matrix2C {
        Matrix2C { a: self.a - rhs.a, b: self.b - rhs.b, c: self.c - rhs.c, d: self.d - rhs.d }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Inverse through the adjugate; the matrices handled here stay near
    /// SL(2), so the determinant is well away from zero.
    pub fn inverse(&self) -> Result<Matrix2C> {
        let det = self.det();
        if det.norm() < 1e-12 {
            return Err(Error::Numeric("matrix numerically singular".into()));
        }
        let inv = det.inv();
        Ok(Matrix2C { a: self.d * inv, b: -self.b * inv, c: -self.c * inv, d: self.a * inv })
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Frobenius distance to sigma * I minimized over the sign sigma.
    pub fn distance_to_projective_identity(&self) -> f64 {
        let id = Matrix2C::identity();
        let plus = self.sub(&id).frobenius_norm();
        let minus = self.add(&id).frobenius_norm();
        plus.min(minus)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Column action on a vector (x, y).
    pub fn apply(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([
            [[self.a.re, self.a.im], [self.b.re, self.b.im]],
            [[self.c.re, self.c.im], [self.d.re, self.d.im]],
        ])
    }
}

/// One smooth piece of an integration path.
#[derive(Debug, Clone, Copy)]
pub enum PathSegment {
    Line { from: Complex64, to: Complex64 },
    /// Circular arc center + radius e^{i theta}, theta running linearly from
    /// `from_angle` to `to_angle`; counterclockwise iff to_angle > from_angle.
    Arc { center: Complex64, radius: f64, from_angle: f64, to_angle: f64 },
}

impl PathSegment {
    /// Position and velocity at parameter t in [0, 1].
    fn at(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            PathSegment::Line { from, to } => (from + (to - from) * t, to - from),
            PathSegment::Arc { center, radius, from_angle, to_angle } => {
                let theta = from_angle + (to_angle - from_angle) * t;
                let e = Complex64::from_polar(radius, theta);
                (center + e, e * Complex64::new(0.0, to_angle - from_angle))
            }
        }
    }

    fn start(&self) -> Complex64 {
        self.at(0.0).0
    }

    fn end(&self) -> Complex64 {
        self.at(1.0).0
    }

    fn reversed(&self) -> PathSegment {
        match *self {
            PathSegment::Line { from, to } => PathSegment::Line { from: to, to: from },
            PathSegment::Arc { center, radius, from_angle, to_angle } => {
                PathSegment::Arc { center, radius, from_angle: to_angle, to_angle: from_angle }
            }
        }
    }

    /// Exact distance from a point to the segment.
    fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            PathSegment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0);
                (p - (from + d * t)).norm()
            }
            PathSegment::Arc { center, radius, from_angle, to_angle } => {
                let radial = ((p - center).norm() - radius).abs();
                if (to_angle - from_angle).abs() >= 2.0 * std::f64::consts::PI - 1e-12 {
                    return radial;
                }
                // Partial arc: radial distance if the point's angle lies in
                // the swept sector, otherwise the nearer endpoint.
                let ang = (p - center).arg();
                let lo = from_angle.min(to_angle);
                let hi = from_angle.max(to_angle);
                let tau = 2.0 * std::f64::consts::PI;
                let mut a = ang;
                while a < lo {
                    a += tau;
                }
                if a <= hi {
                    radial
                } else {
                    (p - self.start()).norm().min((p - self.end()).norm())
                }
            }
        }
    }
}

/// A closed loop based at `base`, encircling `around` (None: the loop at
/// infinity, which encircles every finite singular point).
#[derive(Debug, Clone)]
pub struct PathLoop {
    pub base: Complex64,
    pub segments: Vec<PathSegment>,
    pub around: Option<Complex64>,
    /// Minimum distance from the path to any singular point it was built
    /// against, including the encircled one.
    pub clearance: f64,
}

impl PathLoop {
    /// The same loop traversed backwards (inverse class).
    pub fn reversed(&self) -> PathLoop {
        PathLoop {
            base: self.base,
            segments: self.segments.iter().rev().map(PathSegment::reversed).collect(),
            around: self.around,
            clearance: self.clearance,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Invalid("path loop has no segments".into()));
        }
        let scale = 1.0 + self.segments.iter().map(|s| s.start().norm()).fold(0.0, f64::max);
        let mut prev = self.base;
        for seg in &self.segments {
            if (seg.start() - prev).norm() > 1e-9 * scale {
                return Err(Error::Invalid("path loop segments are not contiguous".into()));
            }
            prev = seg.end();
        }
        if (prev - self.base).norm() > 1e-9 * scale {
            return Err(Error::Invalid("path loop does not close up".into()));
        }
        Ok(())
    }

    fn min_distance_to(&self, p: Complex64) -> f64 {
        self.segments.iter().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min)
    }
}

/// One lasso per finite singular point: out along the ray from the base,
/// once counterclockwise around the point, and back. Loops are returned by
/// decreasing argument of (point - base); for a base below the points this
/// reads left to right, and the composite gamma_1 ... gamma_s (in list
/// order, rightmost traversed first) is homotopic to the big
/// counterclockwise circle, i.e. to the inverse of the loop at infinity.
pub fn standard_loops(singulars: &[Complex64], base: Complex64) -> Result<Vec<PathLoop>> {
    for s in singulars {
        if (s - base).norm() < 1e-12 {
            return Err(Error::Invalid(
                "base point coincides with a singular point".into(),
            ));
        }
    }
    for (i, s) in singulars.iter().enumerate() {
        for t in &singulars[i + 1..] {
            if (s - t).norm() < 1e-12 {
                return Err(Error::Invalid("singular points must be distinct".into()));
            }
        }
    }
    let mut radius = f64::INFINITY;
    for (i, s) in singulars.iter().enumerate() {
        radius = radius.min((s - base).norm() / 3.0);
        for t in &singulars[i + 1..] {
            radius = radius.min((s - t).norm() / 3.0);
        }
    }
    let mut order: Vec<usize> = (0..singulars.len()).collect();
    order.sort_by(|&i, &j| {
        let ai = (singulars[i] - base).arg();
        let aj = (singulars[j] - base).arg();
        aj.partial_cmp(&ai)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                let di = (singulars[i] - base).norm();
                let dj = (singulars[j] - base).norm();
                di.partial_cmp(&dj).unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    let mut loops = Vec::with_capacity(singulars.len());
    for &i in &order {
        let c = singulars[i];
        let dir = (base - c) / (base - c).norm();
        let entry = c + dir * radius;
        let theta = (base - c).arg();
        let segments = vec![
            PathSegment::Line { from: base, to: entry },
            PathSegment::Arc {
                center: c,
                radius,
                from_angle: theta,
                to_angle: theta + 2.0 * std::f64::consts::PI,
            },
            PathSegment::Line { from: entry, to: base },
        ];
        let mut lp = PathLoop { base, segments, around: Some(c), clearance: radius };
        let clearance = singulars
            .iter()
            .map(|s| lp.min_distance_to(*s))
            .fold(f64::INFINITY, f64::min);
        if clearance < radius * 1e-6 {
            return Err(Error::Invalid(
                "loop corridor passes through another singular point; move the base".into(),
            ));
        }
        lp.clearance = clearance;
        lp.validate()?;
        loops.push(lp);
    }
    Ok(loops)
}

/// The loop at infinity: the circle through the base around all finite
/// singular points, traversed clockwise in the chart, which is once
/// counterclockwise around infinity.
pub fn infinity_loop(singulars: &[Complex64], base: Complex64) -> Result<PathLoop> {
    let n = singulars.len() as f64;
    let center = if singulars.is_empty() {
        Complex64::new(0.0, 0.0)
    } else {
        singulars.iter().sum::<Complex64>() / n
    };
    let radius = (base - center).norm();
    let spread = singulars.iter().map(|s| (s - center).norm()).fold(0.0, f64::max);
    if radius <= spread {
        return Err(Error::Invalid(
            "base point lies inside the singular cluster; the circle at infinity would cross it"
                .into(),
        ));
    }
    let theta = (base - center).arg();
    let lp = PathLoop {
        base,
        segments: vec![PathSegment::Arc {
            center,
            radius,
            from_angle: theta,
            to_angle: theta - 2.0 * std::f64::consts::PI,
        }],
        around: None,
        clearance: radius - spread,
    };
    lp.validate()?;
    Ok(lp)
}

/// r compiled to complex double-precision Horner form.
struct NumericRat {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

impl NumericRat {
    fn compile(r: &RatFunc) -> NumericRat {
        let lift = |cs: &[Rational]| -> Vec<Complex64> {
            cs.iter().map(|c| Complex64::new(rational_to_f64(c), 0.0)).collect()
        };
        NumericRat { num: lift(r.num().coeffs()), den: lift(r.den().coeffs()) }
    }

    fn eval(&self, y: Complex64) -> Complex64 {
        let horner = |cs: &[Complex64]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in cs.iter().rev() {
                acc = acc * y + c;
            }
            acc
        };
        if self.num.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        horner(&self.num) / horner(&self.den)
    }
}

/// Right-hand side dF/dt = v * A(y) * F with A = [[0,1],[r,0]].
fn rhs(r: &NumericRat, y: Complex64, v: Complex64, f: &Matrix2C) -> Matrix2C {
    let rv = r.eval(y);
    Matrix2C { a: f.c * v, b: f.d * v, c: rv * f.a * v, d: rv * f.b * v }
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn integrate_segment(
    r: &NumericRat,
    seg: &PathSegment,
    mut f: Matrix2C,
    tol: f64,
    h_max: f64,
) -> Result<Matrix2C> {
    let mut t = 0.0f64;
    let mut h = h_max.min(0.05);
    let mut steps = 0usize;
    while t < 1.0 {
        if steps > 200_000 {
            return Err(Error::Numeric(
                "step count exceeded while integrating a loop segment".into(),
            ));
        }
        steps += 1;
        if h < 1e-13 {
            return Err(Error::Numeric(
                "step size underflow: the path runs too close to a singularity".into(),
            ));
        }
        h = h.min(1.0 - t);
        let mut k: Vec<Matrix2C> = Vec::with_capacity(7);
        let (y0, v0) = seg.at(t);
        k.push(rhs(r, y0, v0, &f));
        for stage in 0..6 {
            let mut acc = Matrix2C {
                a: Complex64::new(0.0, 0.0),
                b: Complex64::new(0.0, 0.0),
                c: Complex64::new(0.0, 0.0),
                d: Complex64::new(0.0, 0.0),
            };
            for (j, kj) in k.iter().enumerate() {
                let w = DP_A[stage][j];
                if w != 0.0 {
                    acc = acc.add(&kj.scale(Complex64::new(w, 0.0)));
                }
            }
            let fs = f.add(&acc.scale(Complex64::new(h, 0.0)));
            let (ys, vs) = seg.at(t + DP_C[stage] * h);
            k.push(rhs(r, ys, vs, &fs));
        }
        let mut inc = Matrix2C {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        };
        let mut err = inc;
        for (j, kj) in k.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                inc = inc.add(&kj.scale(Complex64::new(DP_B5[j], 0.0)));
            }
            if DP_ERR[j] != 0.0 {
                err = err.add(&kj.scale(Complex64::new(DP_ERR[j], 0.0)));
            }
        }
        let local = err.frobenius_norm() * h;
        let budget = tol * f.frobenius_norm().max(1.0);
        if local <= budget {
            f = f.add(&inc.scale(Complex64::new(h, 0.0)));
            if !f.is_finite() {
                return Err(Error::Numeric("non-finite values during integration".into()));
            }
            t += h;
        }
        let ratio = if local > 0.0 { budget / local } else { 10.0 };
        h = (h * (0.9 * ratio.powf(0.2)).clamp(0.2, 5.0)).min(h_max);
    }
    Ok(f)
}

/// Continue the identity frame (z, z') around the loop; the result is the
/// loop's monodromy matrix.
pub fn integrate_ode_along(r: &RatFunc, path: &PathLoop, tol: f64) -> Result<Matrix2C> {
    if tol <= 0.0 {
        return Err(Error::Invalid("integration tolerance must be positive".into()));
    }
    path.validate()?;
    let compiled = NumericRat::compile(r);
    let mut f = Matrix2C::identity();
    for seg in &path.segments {
        // Clearance caps the step so no single step can jump the corridor.
        let speed = match *seg {
            PathSegment::Line { from, to } => (to - from).norm(),
            PathSegment::Arc { radius, from_angle, to_angle, .. } => {
                radius * (to_angle - from_angle).abs()
            }
        };
        let h_max = if path.clearance.is_finite() && speed > 0.0 {
            (path.clearance / speed).clamp(1e-4, 0.2)
        } else {
            0.2
        };
        f = integrate_segment(&compiled, seg, f, tol, h_max)?;
    }
    Ok(f)
}

/// Per-loop entry of the monodromy report.
#[derive(Debug, Clone)]
pub struct LoopRow {
    /// Display label of the encircled point ("0", "1728", "inf").
    pub label: String,
    pub matrix: Matrix2C,
    pub trace: Complex64,
    /// |det M - 1|.
    pub det_residual: f64,
    /// Target |trace| = 2 cos(pi d) from the exponent difference d at the
    /// point (2 for a cusp).
    pub expected_abs_trace: f64,
    /// | |trace| - expected |.
    pub trace_error: f64,
}

/// Numeric evidence about the monodromy group of a normal-form equation.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    /// Finite-point loops in traversal order, then the loop at infinity.
    pub rows: Vec<LoopRow>,
    /// Frobenius distance of M_inf M_1 ... M_s from sigma I, minimized over
    /// the sign sigma.
    pub relation_residual: f64,
    /// Pair of row indices with the largest commutator deviation
    /// ||A B A^-1 B^-1 - I||, with that deviation.
    pub least_commutative: Option<(usize, usize, f64)>,
    /// A word in the loop matrices with real trace of magnitude > 2, if the
    /// bounded search found one.
    pub hyperbolic_witness: Option<(String, f64)>,
    /// Both pieces of Zariski-density evidence present: an essentially
    /// non-commuting pair and a hyperbolic element.
    pub dense_evidence: bool,
}

impl MonodromyReport {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        json!({
            "loops": self.rows.iter().map(|row| json!({
                "around": row.label,
                "matrix": row.matrix.to_json(),
                "trace": [row.trace.re, row.trace.im],
                "det_residual": row.det_residual,
                "expected_abs_trace": row.expected_abs_trace,
                "trace_error": row.trace_error,
            })).collect::<Vec<_>>(),
            "relation_residual": self.relation_residual,
            "least_commutative": self.least_commutative.map(|(i, j, v)| json!({
                "rows": [i, j],
                "commutator_distance": v,
            })),
            "hyperbolic_witness": self.hyperbolic_witness.as_ref().map(|(w, t)| json!({
                "word": w,
                "abs_trace": t,
            })),
            "dense_evidence": self.dense_evidence,
        })
    }
}

impl Serialize for MonodromyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

fn expected_from_difference(d: f64) -> f64 {
    2.0 * (std::f64::consts::PI * d).cos().abs()
}

/// Breadth-first search over positive words in the loop matrices for a
/// hyperbolic element (real trace of magnitude > 2).
fn hyperbolic_search(mats: &[(String, Matrix2C)], max_len: usize) -> Option<(String, f64)> {
    let mut frontier: Vec<(String, Matrix2C)> =
        mats.iter().map(|(l, m)| (l.clone(), *m)).collect();
    for _ in 0..max_len {
        for (word, m) in &frontier {
            let tr = m.trace();
            if tr.im.abs() < 1e-4 && tr.re.abs() > 2.0 + 1e-6 {
                return Some((word.clone(), tr.re.abs()));
            }
        }
        let mut next = Vec::with_capacity(frontier.len() * mats.len());
        for (word, m) in &frontier {
            for (l, g) in mats {
                next.push((format!("{word}*{l}"), m.mul(g)));
            }
        }
        frontier = next;
        if frontier.len() > 20_000 {
            break;
        }
    }
    None
}

/// Monodromy report with an automatically chosen base point below the
/// singular points.
pub fn monodromy_report(sig: &Signature, r: &RatFunc, tol: f64) -> Result<MonodromyReport> {
    let points = classify_singularities(r)?;
    let finite: Vec<f64> = points
        .iter()
        .filter_map(|p| match &p.location {
            Location::Finite(q) if p.is_singular() => Some(rational_to_f64(q)),
            _ => None,
        })
        .collect();
    let center: f64 = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    let spread =
        finite.iter().map(|x| (x - center).abs()).fold(0.0, f64::max).max(0.5);
    let base = Complex64::new(center, -2.0 * spread - 1.0);
    monodromy_report_with_base(sig, r, tol, base)
}

/// Monodromy report from a caller-chosen base point. The report's traces are
/// base-independent up to the integration tolerance; the matrices themselves
/// change by simultaneous conjugation.
pub fn monodromy_report_with_base(
    sig: &Signature,
    r: &RatFunc,
    tol: f64,
    base: Complex64,
) -> Result<MonodromyReport> {
    let points = classify_singularities(r)?;
    if points.iter().any(|p| p.kind == PointKind::Irregular) {
        return Err(Error::Unsupported(
            "monodromy reports require regular singular points only".into(),
        ));
    }
    // The signature must match the equation's local data: the multiset of
    // exponent differences at the singular points of r has to equal the
    // signature's angle list.
    let mut diffs: Vec<(Location, Rational)> = Vec::new();
    for p in &points {
        if !p.is_singular() {
            continue;
        }
        let d = p
            .rational_difference()
            .ok_or_else(|| Error::Invalid("irrational exponent difference".into()))?;
        diffs.push((p.location.clone(), d));
    }
    let mut have: Vec<Rational> = diffs.iter().map(|(_, d)| d.clone()).collect();
    let mut want: Vec<Rational> = sig.orders().iter().map(|o| o.angle()).collect();
    have.sort();
    want.sort();
    if have != want {
        return Err(Error::Invalid(
            "r is not the normal form of the given signature: exponent differences disagree"
                .into(),
        ));
    }

    let finite: Vec<(Complex64, String, f64)> = diffs
        .iter()
        .filter_map(|(loc, d)| match loc {
            Location::Finite(q) => Some((
                Complex64::new(rational_to_f64(q), 0.0),
                crate::rational::format_rational(q),
                rational_to_f64(d),
            )),
            Location::Infinity => None,
        })
        .collect();
    let d_inf = diffs
        .iter()
        .find(|(loc, _)| *loc == Location::Infinity)
        .map(|(_, d)| rational_to_f64(d))
        .unwrap_or(1.0);

    let singulars: Vec<Complex64> = finite.iter().map(|(p, _, _)| *p).collect();
    let loops = standard_loops(&singulars, base)?;
    let mut rows = Vec::with_capacity(loops.len() + 1);
    for lp in &loops {
        let target = lp.around.expect("finite loop");
        let (_, label, diff) = finite
            .iter()
            .find(|(p, _, _)| (p - target).norm() < 1e-9)
            .expect("loop target is a singular point");
        let matrix = integrate_ode_along(r, lp, tol).map_err(|e| {
            Error::Numeric(format!("integration failed on the loop around {label}: {e}"))
        })?;
        let trace = matrix.trace();
        let expected = expected_from_difference(*diff);
        rows.push(LoopRow {
            label: label.clone(),
            matrix,
            trace,
            det_residual: (matrix.det() - Complex64::new(1.0, 0.0)).norm(),
            expected_abs_trace: expected,
            trace_error: (trace.norm() - expected).abs(),
        });
    }
    let big = infinity_loop(&singulars, base)?;
    let m_inf = integrate_ode_along(r, &big, tol)
        .map_err(|e| Error::Numeric(format!("integration failed on the loop at infinity: {e}")))?;
    let trace = m_inf.trace();
    let expected = expected_from_difference(d_inf);
    rows.push(LoopRow {
        label: "inf".into(),
        matrix: m_inf,
        trace,
        det_residual: (m_inf.det() - Complex64::new(1.0, 0.0)).norm(),
        expected_abs_trace: expected,
        trace_error: (trace.norm() - expected).abs(),
    });

    // Sphere relation: M_inf * M_1 * ... * M_s = I up to sign.
    let mut product = m_inf;
    for row in rows.iter().take(rows.len() - 1) {
        product = product.mul(&row.matrix);
    }
    let relation_residual = product.distance_to_projective_identity();

    let mut least_commutative: Option<(usize, usize, f64)> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let a = &rows[i].matrix;
            let b = &rows[j].matrix;
            let comm = a.mul(b).mul(&a.inverse()?).mul(&b.inverse()?);
            let dist = comm.sub(&Matrix2C::identity()).frobenius_norm();
            if least_commutative.map_or(true, |(_, _, best)| dist > best) {
                least_commutative = Some((i, j, dist));
            }
        }
    }
    let gens: Vec<(String, Matrix2C)> =
        rows.iter().map(|row| (format!("M[{}]", row.label), row.matrix)).collect();
    let hyperbolic_witness = hyperbolic_search(&gens, 8);
    let dense_evidence = least_commutative.map_or(false, |(_, _, d)| d > 0.1)
        && hyperbolic_witness.is_some();
    Ok(MonodromyReport {
        rows,
        relation_residual,
        least_commutative,
        hyperbolic_witness,
        dense_evidence,
    })
}
