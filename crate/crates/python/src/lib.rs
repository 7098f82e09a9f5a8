//! Python bindings for the hauptmodul toolkit: equation derivation, strong
//! minimality with exact certificates, numerical monodromy, q-expansion
//! checks, special polynomials, and effective degree bounds.
//!
//! Structured reports (certificates, monodromy data, residuals) cross the
//! boundary as plain dicts and lists so Python callers need no bespoke types;
//! exact integers arrive as Python ints of arbitrary size.

use hauptmodul::rational::format_rational;
use hauptmodul::{
    andre_pink_bound as core_andre_pink, compute_special_poly, condition_ric_r, digit_count,
    j_series, monodromy_report, parse_ratfunc, triangle_strong_minimality as core_triangle_min,
    verify_schwarzian_q, verify_special_poly, zariski_closure_bound as core_zariski, BoundInput,
    RatFunc, SchwarzianEquation, Signature,
};
use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

fn err(e: hauptmodul::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// JSON reports from the core crate become plain Python objects.
fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// Reduced rational function of y with exact rational coefficients.
#[pyclass(name = "RatFunc", frozen)]
#[derive(Clone)]
struct PyRatFunc {
    inner: RatFunc,
}

#[pymethods]
impl PyRatFunc {
    /// Parses an expression in y with + - * / ^ and parentheses.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_ratfunc(text).map_err(err)? })
    }

    /// Numerator coefficients as "p/q" strings, constant term first.
    fn numerator(&self) -> Vec<String> {
        self.inner.num().coeffs().iter().map(format_rational).collect()
    }

    /// Denominator coefficients as "p/q" strings, constant term first.
    fn denominator(&self) -> Vec<String> {
        self.inner.den().coeffs().iter().map(format_rational).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RatFunc(\"{}\")", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// The equation S(y) + (1/2)(y')^2 R(y) = 0 for a genus-zero uniformizer.
#[pyclass(name = "SchwarzianEquation", frozen)]
struct PyEquation {
    inner: SchwarzianEquation,
}

#[pymethods]
impl PyEquation {
    /// Builds the equation of a hyperbolic triangle signature like "2,3,7"
    /// or "2,3,inf".
    #[staticmethod]
    fn triangle(signature: &str) -> PyResult<Self> {
        let sig = Signature::parse(signature).map_err(err)?;
        Ok(Self { inner: SchwarzianEquation::triangle(&sig).map_err(err)? })
    }

    /// The equation of the classical modular j-function.
    #[staticmethod]
    fn classical_j() -> Self {
        Self { inner: SchwarzianEquation::classical_j() }
    }

    /// The coefficient R(y).
    fn r(&self) -> PyRatFunc {
        PyRatFunc { inner: self.inner.r().clone() }
    }

    /// Coefficient r = -R/4 of the normal form z'' = r z.
    fn normal_form(&self) -> PyRatFunc {
        PyRatFunc { inner: self.inner.to_normal_form() }
    }

    /// Constant term R/4 of the Riccati form u' + u^2 + R/4 = 0.
    fn riccati(&self) -> PyRatFunc {
        PyRatFunc { inner: self.inner.to_riccati() }
    }

    /// Cleared polynomial form a*y'''*y' + b*y''^2 + c*y'^4 as a dict of
    /// coefficient lists plus the total degree.
    fn cleared_form<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let form = self.inner.cleared_polynomial_form();
        let strings =
            |p: &hauptmodul::Poly| p.coeffs().iter().map(format_rational).collect::<Vec<_>>();
        let value = serde_json::json!({
            "a": strings(&form.a),
            "b": strings(&form.b),
            "c": strings(&form.c),
            "form": "a*y'''*y' + b*y''^2 + c*y'^4",
            "total_degree": form.total_degree,
        });
        json_to_py(py, &value)
    }

    /// Points, angles, accessory parameters, and R as a dict.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let value = serde_json::to_value(&self.inner)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_to_py(py, &value)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SchwarzianEquation({})", self.inner)
    }
}

/// Decides strong minimality of an equation through the Kovacic procedure.
///
/// Returns a dict with `minimal` (True, False, or None), `case`, `label`,
/// and the full `verdict` including the certificate or the exhaustive
/// failure log.
#[pyfunction]
fn strong_minimality<'py>(py: Python<'py>, equation: &PyEquation) -> PyResult<Bound<'py, PyAny>> {
    decide_riccati(py, &equation.inner.to_normal_form())
}

/// Same decision at the level of a normal-form coefficient r of z'' = r z.
#[pyfunction]
fn decide_liouvillian<'py>(py: Python<'py>, r: &PyRatFunc) -> PyResult<Bound<'py, PyAny>> {
    decide_riccati(py, &r.inner)
}

fn decide_riccati<'py>(py: Python<'py>, r: &RatFunc) -> PyResult<Bound<'py, PyAny>> {
    let report = condition_ric_r(r).map_err(err)?;
    let case: Value = match report.verdict.case_number() {
        Some(n) => n.into(),
        None => "undetermined3".into(),
    };
    let value = serde_json::json!({
        "case": case,
        "label": report.label,
        "minimal": report.minimal,
        "verdict": serde_json::to_value(&report.verdict)
            .map_err(|e| PyValueError::new_err(e.to_string()))?,
    });
    json_to_py(py, &value)
}

/// Closed-form strong-minimality test for a triangle signature.
#[pyfunction]
fn triangle_strong_minimality(signature: &str) -> PyResult<bool> {
    let sig = Signature::parse(signature).map_err(err)?;
    core_triangle_min(&sig).map_err(err)
}

/// Integrates the normal form of a triangle equation around each singular
/// point; returns loop matrices, traces, determinant and relation residuals
/// as a dict.
#[pyfunction]
#[pyo3(signature = (signature, tol = 1e-10))]
fn monodromy<'py>(py: Python<'py>, signature: &str, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let sig = Signature::parse(signature).map_err(err)?;
    let eq = SchwarzianEquation::triangle(&sig).map_err(err)?;
    let report = monodromy_report(&sig, &eq.to_normal_form(), tol).map_err(err)?;
    json_to_py(py, &report.to_json())
}

/// Coefficients of the modular j-function as Python ints, starting at the
/// q^-1 term and running through q^order.
#[pyfunction]
fn j_coefficients(order: i64) -> PyResult<Vec<BigInt>> {
    if order < -1 {
        return Err(PyValueError::new_err("order must be at least -1"));
    }
    let series = j_series(order).map_err(err)?;
    let mut out = Vec::new();
    for n in -1..=order {
        let c = series.coeff(n).map_err(err)?;
        if !c.is_integer() {
            return Err(PyValueError::new_err(format!("coefficient at q^{n} is not integral")));
        }
        out.push(c.to_integer());
    }
    Ok(out)
}

/// Checks the q-expansion of j against its Schwarzian equation through
/// q^order; returns the residual report as a dict.
#[pyfunction]
#[pyo3(signature = (order = 40))]
fn verify_j<'py>(py: Python<'py>, order: i64) -> PyResult<Bound<'py, PyAny>> {
    if order < 0 {
        return Err(PyValueError::new_err("order must be non-negative"));
    }
    let series = j_series(order + 20).map_err(err)?;
    let report =
        verify_schwarzian_q(&hauptmodul::classical_j_r(), &series, order).map_err(err)?;
    json_to_py(py, &report.to_json())
}

/// Computes the special polynomial Phi_N (N = 2 or 3) and verifies the
/// relation Phi_N(j(q), j(q^N)) = 0 through q^order.
#[pyfunction]
#[pyo3(signature = (level, order = 30))]
fn special_poly<'py>(py: Python<'py>, level: u32, order: i64) -> PyResult<Bound<'py, PyAny>> {
    if order < 1 {
        return Err(PyValueError::new_err("order must be at least 1"));
    }
    let truncation = (order + 10).max(40);
    let phi = compute_special_poly(level, truncation).map_err(err)?;
    let residual = verify_special_poly(&phi, level, order).map_err(err)?;
    let mut value = phi.to_json();
    let object = value.as_object_mut().expect("polynomial report is an object");
    object.insert("residual".into(), residual.to_json());
    object.insert("symmetric".into(), phi.is_symmetric().into());
    object.insert("text".into(), phi.to_plain_text().into());
    json_to_py(py, &value)
}

/// The degree bound ((2r+2)^n * degV)^(2^(3n)-1) as an exact integer.
#[pyfunction(name = "andre_pink_bound")]
fn andre_pink_bound_py(r: u64, n: u32, deg_v: u64) -> PyResult<BigUint> {
    core_andre_pink(r, n, deg_v).map_err(err)
}

/// The degree bound degX^(l*2^(m*l)) * degS^(2^(m*l)-1) as an exact integer.
#[pyfunction(name = "zariski_closure_bound")]
fn zariski_closure_bound_py(deg_x: u64, deg_s: u64, m: u32, ell: u32) -> PyResult<BigUint> {
    core_zariski(&BoundInput { deg_x, deg_s, m, ell }).map_err(err)
}

/// Number of decimal digits of a bound, without converting in Python.
#[pyfunction]
fn bound_digits(value: BigUint) -> usize {
    digit_count(&value)
}

#[pymodule]
fn hauptmodul_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRatFunc>()?;
    m.add_class::<PyEquation>()?;
    m.add_function(wrap_pyfunction!(strong_minimality, m)?)?;
    m.add_function(wrap_pyfunction!(decide_liouvillian, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_strong_minimality, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy, m)?)?;
    m.add_function(wrap_pyfunction!(j_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(verify_j, m)?)?;
    m.add_function(wrap_pyfunction!(special_poly, m)?)?;
    m.add_function(wrap_pyfunction!(andre_pink_bound_py, m)?)?;
    m.add_function(wrap_pyfunction!(zariski_closure_bound_py, m)?)?;
    m.add_function(wrap_pyfunction!(bound_digits, m)?)?;
    Ok(())
}
