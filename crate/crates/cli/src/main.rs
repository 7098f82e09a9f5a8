//! `hauptmodul` command line: derive Schwarzian equations of genus-zero
//! uniformizers, decide strong minimality with exact certificates, certify
//! monodromy numerically, verify q-expansions, compute special (modular)
//! polynomials, and evaluate effective degree bounds.
//!
//! Output contract: results go to stdout, diagnostics to stderr, and the exit
//! status is 0 exactly when every requested check passed. With `--json` the
//! report is byte-identical across identical invocations: keys are emitted in
//! sorted order, floats use the shortest round-trip form, and wall-clock time
//! appears only in the human-readable output.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hauptmodul::rational::format_rational;
use hauptmodul::{
    andre_pink_bound, classical_j_r, classify_singularities, compute_special_poly,
    condition_ric_r, digit_count, j_series, monodromy_report, parse_ratfunc,
    triangle_strong_minimality, verify_schwarzian_q, verify_special_poly, zariski_closure_bound,
    BoundInput, CaseTag, ClearedForm, KovacicVerdict, Poly, RatFunc, Rational, ResidualReport,
    SchwarzianEquation, Signature,
};
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "hauptmodul",
    version,
    about = "Schwarzian differential equations of genus-zero Fuchsian uniformizers",
    propagate_version = true
)]
struct Cli {
    /// Emit a machine-readable JSON report on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the equation S(y) + (1/2)(y')^2 R(y) = 0 together with its
    /// normal, Riccati, and cleared polynomial forms.
    Derive(Source),
    /// Decide strong minimality through the Kovacic procedure, producing an
    /// exact certificate or an exhaustive failure log.
    Minimality {
        #[command(flatten)]
        source: Source,
        /// Also run the closed-form triangle test and report agreement.
        #[arg(long)]
        fast_path: bool,
    },
    /// Integrate the normal form around each singular point and check the
    /// monodromy determinants, traces, and the product relation.
    Monodromy {
        /// Triangle signature `k,l,m`: integers >= 2 or `inf`.
        #[arg(long, value_name = "K,L,M")]
        triangle: String,
        /// Local error tolerance of the integrator.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Check the q-expansion of the modular j-function against its Schwarzian
    /// equation.
    VerifyJ {
        /// Verify the residual through q^ORDER.
        #[arg(long, default_value_t = 40, value_name = "ORDER")]
        order: i64,
    },
    /// Compute the special polynomial Phi_N and verify the relation
    /// Phi_N(j(q), j(q^N)) = 0.
    SpecialPoly {
        /// Level N (2 or 3).
        #[arg(short = 'N', long, value_name = "N")]
        level: u32,
        /// Verify the relation through q^ORDER.
        #[arg(long, default_value_t = 30, value_name = "ORDER")]
        order: i64,
    },
    /// Evaluate an effective degree bound as an exact integer.
    Bound(BoundArgs),
}

/// Where the equation comes from: a triangle signature, the classical
/// j-function, or a Schwarzian coefficient R given directly.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Triangle signature `k,l,m`: integers >= 2 or `inf`.
    #[arg(long, value_name = "K,L,M")]
    triangle: Option<String>,
    /// The classical modular j-function equation.
    #[arg(long)]
    classical_j: bool,
    /// Coefficient R(y) as an expression in y, e.g.
    /// "(y^2-1968*y+2654208)/(y^2*(y-1728)^2)".
    #[arg(long = "R", value_name = "EXPR")]
    r: Option<String>,
}

#[derive(Args)]
struct BoundArgs {
    /// The bound ((2r+2)^n * degV)^(2^(3n)-1); needs -r, -n, --degV.
    #[arg(long)]
    andre_pink: bool,
    /// The bound degX^(l*2^(m*l)) * degS^(2^(m*l)-1); needs --degX, --degS,
    /// -m, -l.
    #[arg(long)]
    zariski: bool,
    /// Parameter r (order of the equation data), r >= 3.
    #[arg(short = 'r', long, value_name = "R")]
    r: Option<u64>,
    /// Parameter n (number of coordinates), n >= 1.
    #[arg(short = 'n', long, value_name = "N")]
    n: Option<u32>,
    /// Degree parameter degV >= 1.
    #[arg(long = "degV", value_name = "DEG")]
    deg_v: Option<u64>,
    /// Degree parameter degX >= 1.
    #[arg(long = "degX", value_name = "DEG")]
    deg_x: Option<u64>,
    /// Degree parameter degS >= 1.
    #[arg(long = "degS", value_name = "DEG")]
    deg_s: Option<u64>,
    /// Jet depth m >= 1.
    #[arg(short = 'm', long, value_name = "M")]
    m: Option<u32>,
    /// Dimension parameter l >= 1.
    #[arg(short = 'l', long = "ell", value_name = "L")]
    ell: Option<u32>,
}

/// One finished invocation: the JSON report pieces plus the human lines.
struct Report {
    command: &'static str,
    inputs: Value,
    results: Value,
    pass: bool,
    human: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let report = match run(&cli.command) {
        Ok(report) => report,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::FAILURE;
        }
    };
    let mut text = if cli.json {
        let doc = json!({
            "command": report.command,
            "inputs": report.inputs,
            "pass": report.pass,
            "results": report.results,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    } else {
        let mut lines = report.human.join("\n");
        lines.push_str(&format!("\nwall time: {:.3}s", start.elapsed().as_secs_f64()));
        lines
    };
    text.push('\n');
    // A consumer like `head` may close the pipe early; die quietly with the
    // conventional SIGPIPE status instead of panicking.
    if std::io::Write::write_all(&mut std::io::stdout().lock(), text.as_bytes()).is_err() {
        return ExitCode::from(141);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(command: &Command) -> Result<Report, String> {
    match command {
        Command::Derive(source) => cmd_derive(source),
        Command::Minimality { source, fast_path } => cmd_minimality(source, *fast_path),
        Command::Monodromy { triangle, tol } => cmd_monodromy(triangle, *tol),
        Command::VerifyJ { order } => cmd_verify_j(*order),
        Command::SpecialPoly { level, order } => cmd_special_poly(*level, *order),
        Command::Bound(args) => cmd_bound(args),
    }
}

fn es<T>(r: hauptmodul::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

enum Resolved {
    Equation(SchwarzianEquation),
    Raw(RatFunc),
}

impl Source {
    fn resolve(&self) -> Result<(Resolved, String, Value), String> {
        if let Some(text) = &self.triangle {
            let sig = es(Signature::parse(text))?;
            let eq = es(SchwarzianEquation::triangle(&sig))?;
            Ok((Resolved::Equation(eq), format!("triangle ({text})"), json!({ "triangle": text })))
        } else if self.classical_j {
            Ok((
                Resolved::Equation(SchwarzianEquation::classical_j()),
                "classical j".to_string(),
                json!({ "classical_j": true }),
            ))
        } else {
            let text = self.r.as_ref().expect("clap group guarantees a source");
            let r = es(parse_ratfunc(text))?;
            Ok((Resolved::Raw(r), "R as given".to_string(), json!({ "R": text })))
        }
    }
}

fn ratfunc_json(f: &RatFunc) -> Value {
    serde_json::to_value(f).expect("rational function serializes")
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(format_rational(c))).collect())
}

fn cleared_json(form: &ClearedForm) -> Value {
    json!({
        "a": poly_json(&form.a),
        "b": poly_json(&form.b),
        "c": poly_json(&form.c),
        "form": "a*y'''*y' + b*y''^2 + c*y'^4",
        "total_degree": form.total_degree,
    })
}

fn cmd_derive(source: &Source) -> Result<Report, String> {
    let (resolved, label, source_json) = source.resolve()?;
    let mut human = vec![format!("source: {label}")];
    let (big_r, equation_json) = match &resolved {
        Resolved::Equation(eq) => {
            human.push(format!("{eq}"));
            (eq.r().clone(), serde_json::to_value(eq).expect("equation serializes"))
        }
        Resolved::Raw(r) => {
            human.push(format!("R = {r}"));
            (r.clone(), Value::Null)
        }
    };
    let normal = big_r.scale(&rat(-1, 4));
    let riccati = big_r.scale(&rat(1, 4));
    let cleared = match &resolved {
        Resolved::Equation(eq) => eq.cleared_polynomial_form(),
        Resolved::Raw(r) => {
            let points = es(classify_singularities(&normal))?;
            let infinity_singular =
                points.iter().any(|p| p.location.is_infinite() && p.is_singular());
            ClearedForm::from_r(r, infinity_singular)
        }
    };
    human.push(format!("normal form: z'' = r z with r = -R/4 = {normal}"));
    human.push(format!("Riccati form: u' + u^2 + R/4 = 0 with R/4 = {riccati}"));
    human.push(format!("cleared polynomial form: {cleared}"));
    human.push(format!("total degree: {}", cleared.total_degree));
    let results = json!({
        "R": ratfunc_json(&big_r),
        "cleared": cleared_json(&cleared),
        "equation": equation_json,
        "normal_form_r": ratfunc_json(&normal),
        "riccati_constant": ratfunc_json(&riccati),
    });
    Ok(Report {
        command: "derive",
        inputs: json!({ "source": source_json }),
        results,
        pass: true,
        human,
    })
}

/// Renders `y - pole` with the sign folded in, for witness display.
fn linear_factor(pole: &Rational) -> String {
    let text = format_rational(pole);
    if text == "0" {
        "y".to_string()
    } else if let Some(positive) = text.strip_prefix('-') {
        format!("(y + {positive})")
    } else {
        format!("(y - {text})")
    }
}

fn describe_witness(verdict: &KovacicVerdict) -> Vec<String> {
    match verdict.case {
        CaseTag::Case1 => {
            let Some(cert) = &verdict.case1 else { return Vec::new() };
            let mut terms: Vec<String> = cert
                .local
                .iter()
                .map(|(pole, alpha)| {
                    let a = alpha.to_string();
                    let a = if a.chars().any(|ch| "+-*/ ".contains(ch)) {
                        format!("({a})")
                    } else {
                        a
                    };
                    format!("{a}/{}", linear_factor(pole))
                })
                .collect();
            if cert.p.len() > 1 {
                terms.push(format!("P'/P with deg P = {}", cert.p.len() - 1));
            }
            let omega = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            vec![format!("witness: rational Riccati solution omega = {omega}")]
        }
        CaseTag::Case2 => vec![
            "witness: Riccati solution algebraic of degree 2 (case 2 certificate attached)"
                .to_string(),
        ],
        CaseTag::Case3 => vec![
            "witness: algebraic solution from the Schwarz list (case 3 certificate attached)"
                .to_string(),
        ],
        _ => Vec::new(),
    }
}

fn cmd_minimality(source: &Source, fast_path: bool) -> Result<Report, String> {
    let (resolved, label, source_json) = source.resolve()?;
    let normal = match &resolved {
        Resolved::Equation(eq) => eq.to_normal_form(),
        Resolved::Raw(r) => r.scale(&rat(-1, 4)),
    };
    let report = es(condition_ric_r(&normal))?;
    let mut human = vec![format!("source: {label}")];
    match (report.minimal, report.verdict.case_number()) {
        (Some(true), _) => human.push("strongly minimal: yes (Case 4)".to_string()),
        (Some(false), Some(n)) => {
            human.push(format!("strongly minimal: no (case {n} Liouvillian solution)"));
        }
        _ => human.push(format!("strongly minimal: undecided ({})", report.label)),
    }
    match report.minimal {
        Some(true) => human
            .push(format!("exhaustive failure log: {} candidate lines", report.verdict.log.len())),
        Some(false) => {
            human.extend(describe_witness(&report.verdict));
            human.push(format!(
                "certificate re-verified by substitution: {}",
                if report.verdict.verify(&normal) { "yes" } else { "NO" }
            ));
        }
        None => {}
    }
    let mut pass = report.minimal == Some(true);
    let mut fast_json = Value::Null;
    if fast_path {
        let Some(text) = &source.triangle else {
            return Err(
                "--fast-path needs --triangle: the closed-form test only applies to triangle signatures"
                    .into(),
            );
        };
        let sig = es(Signature::parse(text))?;
        let fast = es(triangle_strong_minimality(&sig))?;
        let agrees = fast == (report.minimal == Some(true));
        human.push(format!(
            "fast path (closed form): strongly minimal: {}",
            if fast { "yes" } else { "no" }
        ));
        human.push(format!(
            "agreement with the Kovacic procedure: {}",
            if agrees { "yes" } else { "NO" }
        ));
        pass = pass && agrees;
        fast_json = json!({ "agrees": agrees, "minimal": fast });
    }
    let results = json!({
        "case": report.verdict.case_number().map_or(Value::from("undetermined3"), Value::from),
        "fast_path": fast_json,
        "label": report.label,
        "minimal": report.minimal,
        "verdict": serde_json::to_value(&report.verdict).expect("verdict serializes"),
    });
    Ok(Report {
        command: "minimality",
        inputs: json!({ "fast_path": fast_path, "source": source_json }),
        results,
        pass,
        human,
    })
}

fn cmd_monodromy(triangle: &str, tol: f64) -> Result<Report, String> {
    const DET_TOL: f64 = 1e-8;
    const TRACE_TOL: f64 = 1e-6;
    const RELATION_TOL: f64 = 1e-6;
    let sig = es(Signature::parse(triangle))?;
    let eq = es(SchwarzianEquation::triangle(&sig))?;
    let report = es(monodromy_report(&sig, &eq.to_normal_form(), tol))?;
    let mut human = vec![format!("signature ({triangle}), integrator tolerance {tol:e}")];
    let mut det_max = 0.0_f64;
    let mut trace_max = 0.0_f64;
    for row in &report.rows {
        det_max = det_max.max(row.det_residual);
        trace_max = trace_max.max(row.trace_error);
        human.push(format!(
            "loop around {}: |trace| = {:.9} (target {:.9}, error {:.2e}), |det - 1| = {:.2e}",
            row.label,
            row.trace.norm(),
            row.expected_abs_trace,
            row.trace_error,
            row.det_residual
        ));
    }
    human.push(format!("product of all loops is +/-I up to {:.2e}", report.relation_residual));
    if let Some((i, j, deviation)) = report.least_commutative {
        human.push(format!(
            "non-commuting pair: loops around {} and {} (commutator deviation {:.2e})",
            report.rows[i].label, report.rows[j].label, deviation
        ));
    }
    if let Some((word, trace)) = &report.hyperbolic_witness {
        human.push(format!("hyperbolic element: {word} with |trace| = {trace:.6}"));
    }
    let pass =
        det_max <= DET_TOL && trace_max <= TRACE_TOL && report.relation_residual <= RELATION_TOL;
    human.push(format!(
        "checks (det {DET_TOL:e}, trace {TRACE_TOL:e}, relation {RELATION_TOL:e}): {}",
        if pass { "PASS" } else { "FAIL" }
    ));
    let results = json!({
        "checks": {
            "det_residual_max": det_max,
            "relation_residual": report.relation_residual,
            "tolerances": { "det": DET_TOL, "relation": RELATION_TOL, "trace": TRACE_TOL },
            "trace_error_max": trace_max,
        },
        "report": report.to_json(),
    });
    Ok(Report {
        command: "monodromy",
        inputs: json!({ "tolerance": tol, "triangle": triangle }),
        results,
        pass,
        human,
    })
}

fn cmd_verify_j(order: i64) -> Result<Report, String> {
    if order < 0 {
        return Err("--order must be non-negative".into());
    }
    let series = es(j_series(order + 20))?;
    let residual = es(verify_schwarzian_q(&classical_j_r(), &series, order))?;
    let (pass, line) = match &residual {
        ResidualReport::ZeroThrough { order } => (true, format!("residual zero through q^{order}")),
        ResidualReport::FirstNonzero { order, coefficient } => (
            false,
            format!("residual nonzero at q^{order}: coefficient {}", format_rational(coefficient)),
        ),
    };
    let human = vec!["q-expansion of j against its Schwarzian equation".to_string(), line];
    let results = json!({ "residual": residual.to_json() });
    Ok(Report { command: "verify-j", inputs: json!({ "order": order }), results, pass, human })
}

fn cmd_special_poly(level: u32, order: i64) -> Result<Report, String> {
    if order < 1 {
        return Err("--order must be at least 1".into());
    }
    let truncation = (order + 10).max(40);
    let phi = es(compute_special_poly(level, truncation))?;
    let residual = es(verify_special_poly(&phi, level, order))?;
    let symmetric = phi.is_symmetric();
    let relation_line = match &residual {
        ResidualReport::ZeroThrough { order } => {
            format!("Phi_{level}(j(q), j(q^{level})) = 0 through q^{order}")
        }
        ResidualReport::FirstNonzero { order, coefficient } => format!(
            "Phi_{level}(j(q), j(q^{level})) nonzero at q^{order}: coefficient {}",
            format_rational(coefficient)
        ),
    };
    let pass = symmetric && matches!(residual, ResidualReport::ZeroThrough { .. });
    let human = vec![
        format!("Phi_{level}(X, Y) = {}", phi.to_plain_text()),
        format!("symmetric in X and Y: {}", if symmetric { "yes" } else { "NO" }),
        relation_line,
    ];
    let results = json!({
        "polynomial": phi.to_json(),
        "residual": residual.to_json(),
        "symmetric": symmetric,
    });
    Ok(Report {
        command: "special-poly",
        inputs: json!({ "level": level, "order": order }),
        results,
        pass,
        human,
    })
}

fn cmd_bound(args: &BoundArgs) -> Result<Report, String> {
    match (args.andre_pink, args.zariski) {
        (true, false) => {
            let (r, n, deg_v) = match (args.r, args.n, args.deg_v) {
                (Some(r), Some(n), Some(deg_v)) => (r, n, deg_v),
                _ => return Err("--andre-pink needs -r, -n, and --degV".into()),
            };
            if args.deg_x.is_some() || args.deg_s.is_some() || args.m.is_some() || args.ell.is_some()
            {
                return Err("--degX, --degS, -m, and -l belong to --zariski".into());
            }
            let bound = es(andre_pink_bound(r, n, deg_v))?;
            let digits = digit_count(&bound);
            let human = vec![
                format!("((2r+2)^n * degV)^(2^(3n)-1) with r = {r}, n = {n}, degV = {deg_v}"),
                format!("bound: {bound}"),
                format!("digits: {digits}"),
            ];
            let results = json!({ "bound": bound.to_string(), "digits": digits });
            Ok(Report {
                command: "bound",
                inputs: json!({ "degV": deg_v, "kind": "andre-pink", "n": n, "r": r }),
                results,
                pass: true,
                human,
            })
        }
        (false, true) => {
            let (deg_x, deg_s, m, ell) = match (args.deg_x, args.deg_s, args.m, args.ell) {
                (Some(deg_x), Some(deg_s), Some(m), Some(ell)) => (deg_x, deg_s, m, ell),
                _ => return Err("--zariski needs --degX, --degS, -m, and -l".into()),
            };
            if args.r.is_some() || args.n.is_some() || args.deg_v.is_some() {
                return Err("-r, -n, and --degV belong to --andre-pink".into());
            }
            let bound = es(zariski_closure_bound(&BoundInput { deg_x, deg_s, m, ell }))?;
            let digits = digit_count(&bound);
            let human = vec![
                format!(
                    "degX^(l*2^(m*l)) * degS^(2^(m*l)-1) with degX = {deg_x}, degS = {deg_s}, m = {m}, l = {ell}"
                ),
                format!("bound: {bound}"),
                format!("digits: {digits}"),
            ];
            let results = json!({ "bound": bound.to_string(), "digits": digits });
            Ok(Report {
                command: "bound",
                inputs: json!({
                    "degS": deg_s,
                    "degX": deg_x,
                    "ell": ell,
                    "kind": "zariski",
                    "m": m,
                }),
                results,
                pass: true,
                human,
            })
        }
        _ => Err("choose exactly one of --andre-pink or --zariski".into()),
    }
}
