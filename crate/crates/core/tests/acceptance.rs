//! End-to-end acceptance checks for the toolkit, one per shipped guarantee.
//!
//! This target runs without the libtest harness so that exactly one PASS or
//! FAIL line per criterion is printed unconditionally. A criterion fails by
//! returning an error, panicking, or exceeding its wall-clock budget; the
//! process exit status is nonzero iff any criterion failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hauptmodul::rational::{rat, rat_i};
use hauptmodul::{
    andre_pink_bound, classical_j_r, classify_singularities, compute_special_poly, decide_liouvillian,
    digit_count, j_series, mobius_series, monodromy_report, rescale_hauptmodul,
    schwarzian_of_series, schwarzian_via_jets, schwarzian_via_log_derivative, triangle_r,
    triangle_strong_minimality, verify_schwarzian_q, verify_special_poly, zariski_closure_bound,
    BoundInput, CaseTag, LaurentSeries, Poly, RatFunc, Rational, ResidualReport,
    SchwarzianEquation, Signature, SpecialPoly, TriangleParams,
};

fn es<T>(r: hauptmodul::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Every hyperbolic triangle signature with k <= l <= m <= 10 or m infinite.
fn signatures() -> Vec<(String, Signature)> {
    let mut out = Vec::new();
    for k in 2..=10u32 {
        for l in k..=10 {
            for m in l..=10 {
                push_if_hyperbolic(&mut out, format!("{k},{l},{m}"));
            }
            push_if_hyperbolic(&mut out, format!("{k},{l},inf"));
        }
    }
    out
}

fn push_if_hyperbolic(out: &mut Vec<(String, Signature)>, name: String) {
    if let Ok(sig) = Signature::parse(&name) {
        if sig.is_hyperbolic_triangle() {
            out.push((name, sig));
        }
    }
}

struct SigVerdict {
    name: String,
    case4: bool,
    exhaustive_log: bool,
}

/// General Kovacic path over the whole signature family, shared between
/// criteria 3 and 4. The first caller pays the compute time.
fn general_path() -> &'static Result<Vec<SigVerdict>, String> {
    static CELL: OnceLock<Result<Vec<SigVerdict>, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for (name, sig) in signatures() {
            let nf = es(SchwarzianEquation::triangle(&sig))?.to_normal_form();
            let v = es(decide_liouvillian(&nf))?;
            let exhaustive_log = ["case 1", "case 2", "case 3"]
                .iter()
                .all(|p| v.log.iter().any(|line| line.starts_with(p)))
                && v.log.last().is_some_and(|l| l.contains("every candidate"));
            out.push(SigVerdict { name, case4: v.case == CaseTag::Case4, exhaustive_log });
        }
        Ok(out)
    })
}

fn criterion_1_normalization() -> Result<String, String> {
    let sig = es(Signature::parse("2,3,inf"))?;
    let scaled = es(rescale_hauptmodul(&es(triangle_r(&sig))?, &rat_i(1728)))?;
    let expected = es(RatFunc::new(
        Poly::from_ints(&[2654208, -1968, 1]),
        &Poly::y().pow(2) * &Poly::from_ints(&[-1728, 1]).pow(2),
    ))?;
    ensure(scaled == expected, "rescaled triangle R differs from the pinned coefficient")?;
    ensure(scaled == classical_j_r(), "rescaled triangle R differs from classical_j_r()")?;
    Ok("R for (2,3,inf) rescaled by 1728 equals (y^2-1968y+2654208)/(y^2(y-1728)^2)".into())
}

fn criterion_2_ode_verification() -> Result<String, String> {
    let j = es(j_series(60))?;
    let r = classical_j_r();
    match es(verify_schwarzian_q(&r, &j, 40))? {
        ResidualReport::ZeroThrough { order } => {
            ensure(order == 40, format!("verified only through order {order}"))?
        }
        ResidualReport::FirstNonzero { order, .. } => {
            return Err(format!("clean equation has residual at order {order}"));
        }
    }
    // Bump each coefficient of num and den by one; every perturbation must
    // surface early in the q-expansion.
    let mut perturbations = 0usize;
    for numerator in [true, false] {
        let base = if numerator { r.num() } else { r.den() };
        for idx in 0..base.coeffs().len() {
            let mut c = base.coeffs().to_vec();
            c[idx] = &c[idx] + &rat_i(1);
            let p = Poly::from_coeffs(c);
            let bumped = if numerator {
                es(RatFunc::new(p, r.den().clone()))?
            } else {
                es(RatFunc::new(r.num().clone(), p))?
            };
            match es(verify_schwarzian_q(&bumped, &j, 40))? {
                ResidualReport::ZeroThrough { .. } => {
                    return Err(format!(
                        "perturbing {} coefficient {idx} left the residual zero",
                        if numerator { "numerator" } else { "denominator" }
                    ));
                }
                ResidualReport::FirstNonzero { order, .. } => ensure(
                    order <= 5,
                    format!("perturbation at index {idx} only detected at order {order}"),
                )?,
            }
            perturbations += 1;
        }
    }
    Ok(format!(
        "j_series(60) satisfies the equation through q^40; all {perturbations} unit perturbations detected at order <= 5"
    ))
}

fn criterion_3_strong_minimality() -> Result<String, String> {
    let outcomes = general_path().as_ref().map_err(|e| e.clone())?;
    ensure(outcomes.len() >= 47, format!("only {} signatures enumerated", outcomes.len()))?;
    for o in outcomes {
        ensure(o.case4, format!("({}) not certified Case 4", o.name))?;
        ensure(o.exhaustive_log, format!("({}) verdict log is not exhaustive", o.name))?;
    }
    let v = es(decide_liouvillian(&SchwarzianEquation::classical_j().to_normal_form()))?;
    ensure(v.case == CaseTag::Case4, "classical j normal form not certified Case 4")?;
    ensure(!v.log.is_empty(), "classical j verdict has no failure log")?;
    Ok(format!(
        "{} triangle signatures and classical j are Case 4 with exhaustive candidate logs",
        outcomes.len()
    ))
}

fn criterion_4_triangle_fast_path() -> Result<String, String> {
    let outcomes = general_path().as_ref().map_err(|e| e.clone())?;
    let sigs = signatures();
    let half = rat(1, 2);
    for (o, (name, sig)) in outcomes.iter().zip(&sigs) {
        let fast = es(triangle_strong_minimality(sig))?;
        ensure(fast == o.case4, format!("fast path disagrees with Kovacic on ({name})"))?;
        ensure(fast, format!("fast path declares ({name}) not strongly minimal"))?;
        let p = es(TriangleParams::from_signature(sig))?;
        let ints =
            [&p.lambda, &p.mu, &p.nu].iter().filter(|x| (**x - &half).is_integer()).count();
        ensure(ints <= 1, format!("({name}) has {ints} integral half-shifted exponents"))?;
    }
    Ok(format!(
        "fast path agrees with the general path on all {} signatures; half-shift integer count <= 1 throughout",
        sigs.len()
    ))
}

fn criterion_5_certificate_soundness() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let lin = |a: i64| Poly::linear_root(&rat_i(a));
    let frac = |c: Rational, d: Poly| es(RatFunc::new(Poly::constant(c), d));

    // Case 1: r = omega' + omega^2 for a rational omega with simple poles.
    let pole_pool = [-3i64, -2, -1, 0, 1, 2, 3];
    let coeff_pool =
        [rat_i(-2), rat_i(-1), rat(-1, 2), rat(1, 2), rat_i(1), rat(3, 2), rat_i(2)];
    for i in 0..50 {
        let k = rng.gen_range(1..=3usize);
        let poles: Vec<i64> = pole_pool.choose_multiple(&mut rng, k).copied().collect();
        let mut omega = RatFunc::zero();
        for a in &poles {
            let c = coeff_pool.choose(&mut rng).unwrap().clone();
            omega = &omega + &frac(c, lin(*a))?;
        }
        let r = &omega.derivative() + &(&omega * &omega);
        let v = es(decide_liouvillian(&r))?;
        ensure(v.case == CaseTag::Case1, format!("case-1 instance {i} classified {:?}", v.case))?;
        ensure(v.verify(&r), format!("case-1 certificate {i} failed re-verification"))?;
    }

    // Case 2: omega = u + v sqrt(h) with h = y, v = c/((y-a)(y-b)) and a, b
    // perfect squares, so r = u' + u^2 + v^2 h has rational local exponent
    // differences while omega itself is quadratic over the rational functions.
    let square_pool = [1i64, 4, 9, 16, 25, 36];
    let scale_pool = [rat_i(1), rat_i(2), rat(1, 2), rat(2, 3), rat(5, 7), rat(7, 5)];
    for i in 0..50 {
        let picks: Vec<i64> = square_pool.choose_multiple(&mut rng, 2).copied().collect();
        let (a, b) = (picks[0], picks[1]);
        let c = scale_pool.choose(&mut rng).unwrap().clone();
        let u = &(&frac(rat(1, 2), lin(a))? + &frac(rat(1, 2), lin(b))?)
            + &frac(rat(-1, 4), Poly::y())?;
        let vsq = es(RatFunc::new(
            Poly::y().scale(&(&c * &c)),
            &lin(a).pow(2) * &lin(b).pow(2),
        ))?;
        let r = &(&u.derivative() + &(&u * &u)) + &vsq;
        let v = es(decide_liouvillian(&r))?;
        ensure(v.case == CaseTag::Case2, format!("case-2 instance {i} classified {:?}", v.case))?;
        ensure(v.verify(&r), format!("case-2 certificate {i} failed re-verification"))?;
    }
    Ok("100 round-trip instances classified Case 1/Case 2 and re-verified by substitution".into())
}

fn criterion_6_monodromy() -> Result<String, String> {
    let mut details = Vec::new();
    for (name, mut targets) in [
        ("2,3,inf", vec![0.0f64, 1.0, 2.0]),
        ("2,3,7", vec![0.0, 1.0, 2.0 * (std::f64::consts::PI / 7.0).cos()]),
    ] {
        let sig = es(Signature::parse(name))?;
        let r = es(SchwarzianEquation::triangle(&sig))?.to_normal_form();
        let started = Instant::now();
        let rep = es(monodromy_report(&sig, &r, 1e-10))?;
        let elapsed = started.elapsed();
        ensure(
            elapsed < Duration::from_secs(30),
            format!("({name}) report took {elapsed:.2?}, budget 30s"),
        )?;
        for row in &rep.rows {
            ensure(
                row.det_residual <= 1e-8,
                format!("({name}) loop {}: |det - 1| = {:.2e}", row.label, row.det_residual),
            )?;
            ensure(
                row.trace_error <= 1e-6,
                format!("({name}) loop {}: trace error {:.2e}", row.label, row.trace_error),
            )?;
        }
        let mut got: Vec<f64> = rep.rows.iter().map(|r| r.expected_abs_trace).collect();
        got.sort_by(f64::total_cmp);
        targets.sort_by(f64::total_cmp);
        ensure(got.len() == targets.len(), format!("({name}) has {} loops", got.len()))?;
        for (g, t) in got.iter().zip(&targets) {
            ensure((g - t).abs() < 1e-9, format!("({name}) trace target {g} vs {t}"))?;
        }
        ensure(
            rep.relation_residual <= 1e-6,
            format!("({name}) loop relation residual {:.2e}", rep.relation_residual),
        )?;
        let (_, _, dist) = rep
            .least_commutative
            .ok_or_else(|| format!("({name}) found no non-commuting loop pair"))?;
        ensure(dist > 1e-3, format!("({name}) loops nearly commute: {dist:.2e}"))?;
        details.push(format!("({name}) relation {:.1e}", rep.relation_residual));
    }
    Ok(format!("traces, determinants, and loop relation verified; {}", details.join(", ")))
}

fn kronecker_congruence(phi: &SpecialPoly, level: u32) -> Result<(), String> {
    // Phi_N = (X^N - Y)(X - Y^N) mod N.
    let n = level as usize;
    let modulus = BigInt::from(level);
    for a in 0..=n + 1 {
        for b in 0..=n + 1 {
            let reference: i64 = if (a, b) == (n + 1, 0) || (a, b) == (0, n + 1) {
                1
            } else if (a, b) == (n, n) || (a, b) == (1, 1) {
                -1
            } else {
                0
            };
            let want = BigInt::from(reference).mod_floor(&modulus);
            let got = phi.coefficient(a, b).mod_floor(&modulus);
            ensure(
                got == want,
                format!("Phi_{level} coefficient ({a},{b}) is {got}, not {want} mod {level}"),
            )?;
        }
    }
    Ok(())
}

fn criterion_7_special_polynomials() -> Result<String, String> {
    let phi2 = es(compute_special_poly(2, 40))?;
    ensure(
        es(verify_special_poly(&phi2, 2, 30))?.is_zero(),
        "Phi_2(j(q), j(q^2)) not zero through q^30",
    )?;
    ensure(phi2.is_symmetric(), "Phi_2 is not symmetric")?;
    ensure(
        phi2.coefficient(1, 1) == BigInt::from(40773375u64),
        format!("Phi_2 XY coefficient is {}", phi2.coefficient(1, 1)),
    )?;
    kronecker_congruence(&phi2, 2)?;

    let phi3 = es(compute_special_poly(3, 40))?;
    ensure(
        es(verify_special_poly(&phi3, 3, 30))?.is_zero(),
        "Phi_3(j(q), j(q^3)) not zero through q^30",
    )?;
    ensure(phi3.is_symmetric(), "Phi_3 is not symmetric")?;
    ensure(
        phi3.coefficient(2, 2) == BigInt::from(2587918086u64),
        format!("Phi_3 X^2Y^2 coefficient is {}", phi3.coefficient(2, 2)),
    )?;
    kronecker_congruence(&phi3, 3)?;
    Ok("Phi_2 and Phi_3 vanish on their modular pairs, are symmetric, match the pinned coefficients, and satisfy the Kronecker congruences".into())
}

fn pow_chain(base: &BigUint, exp: u64) -> BigUint {
    let mut acc = BigUint::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn criterion_8_bounds() -> Result<String, String> {
    let small = es(andre_pink_bound(3, 1, 1))?;
    ensure(small == BigUint::from(2097152u64), format!("andre_pink_bound(3,1,1) = {small}"))?;
    ensure(small == pow_chain(&BigUint::from(8u32), 7), "8^7 cross-check failed")?;
    let big = es(andre_pink_bound(3, 2, 1))?;
    let decimal = big.to_str_radix(10);
    ensure(big == pow_chain(&BigUint::from(64u32), 63), "64^63 cross-check failed")?;
    ensure(
        decimal.len() == 114 && digit_count(&big) == 114,
        format!("64^63 has {} digits", decimal.len()),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    for _ in 0..20 {
        let input = BoundInput {
            deg_x: rng.gen_range(1..=6),
            deg_s: rng.gen_range(1..=6),
            m: rng.gen_range(1..=2),
            ell: rng.gen_range(1..=2),
        };
        let me = input.m as u64 * input.ell as u64;
        let expected = pow_chain(&BigUint::from(input.deg_x), input.ell as u64 * (1 << me))
            * pow_chain(&BigUint::from(input.deg_s), (1 << me) - 1);
        ensure(
            es(zariski_closure_bound(&input))? == expected,
            format!("zariski bound mismatch on {input:?}"),
        )?;
    }
    Ok(format!("andre_pink_bound(3,2,1) = {decimal} (114 digits); 20 randomized closure bounds match the pow chain"))
}

/// A series all of whose known coefficients vanish, with a non-vacuous window.
fn known_zero(s: &LaurentSeries, at_least: i64, label: &str) -> Result<(), String> {
    if let Some(v) = s.valuation() {
        return Err(format!("{label}: nonzero coefficient at order {v}"));
    }
    ensure(
        s.precision() >= at_least,
        format!("{label}: only {} known orders", s.precision()),
    )
}

fn criterion_9_schwarzian_calculus() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let coeff = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4));
    for i in 0..100 {
        // f with an invertible derivative, g vanishing to order one.
        let mut fc: Vec<Rational> = (0..8).map(|_| coeff(&mut rng)).collect();
        while fc[1].is_zero() {
            fc[1] = coeff(&mut rng);
        }
        let mut gc: Vec<Rational> = (0..7).map(|_| coeff(&mut rng)).collect();
        while gc[0].is_zero() {
            gc[0] = coeff(&mut rng);
        }
        let f = LaurentSeries::new(0, fc, 12);
        let g = LaurentSeries::new(1, gc, 12);

        let lhs = es(schwarzian_of_series(&es(f.compose(&g))?))?;
        let sfg = es(es(schwarzian_of_series(&f))?.compose(&g))?;
        let gp = g.derivative();
        let rhs = &(&sfg * &(&gp * &gp)) + &es(schwarzian_of_series(&g))?;
        known_zero(&(&lhs - &rhs), 6, &format!("composition law, instance {i}"))?;

        let forms =
            &es(schwarzian_via_log_derivative(&f))? - &es(schwarzian_via_jets(&f))?;
        known_zero(&forms, 6, &format!("form agreement, instance {i}"))?;
    }
    for i in 0..20 {
        let (a, b, c, d) = loop {
            let pick: Vec<Rational> = (0..4).map(|_| rat_i(rng.gen_range(-5i64..=5))).collect();
            let det = &(&pick[0] * &pick[3]) - &(&pick[1] * &pick[2]);
            if !det.is_zero() {
                break (pick[0].clone(), pick[1].clone(), pick[2].clone(), pick[3].clone());
            }
        };
        let m = es(mobius_series(&a, &b, &c, &d, 12))?;
        known_zero(&es(schwarzian_of_series(&m))?, 6, &format!("Moebius, instance {i}"))?;
    }
    Ok("composition law on 100 random series, both Schwarzian forms agree, and 20 Moebius maps have vanishing Schwarzian".into())
}

fn criterion_10_cleared_form_degree() -> Result<String, String> {
    let sigs = signatures();
    for (name, sig) in &sigs {
        let eq = es(SchwarzianEquation::triangle(sig))?;
        let singular = es(classify_singularities(&eq.to_normal_form()))?
            .iter()
            .filter(|p| p.is_singular())
            .count();
        let degree = eq.cleared_polynomial_form().total_degree;
        ensure(
            degree == 2 * singular + 2,
            format!("({name}) cleared degree {degree} with {singular} singular points"),
        )?;
        ensure(degree == 8, format!("({name}) cleared degree {degree}, expected 8"))?;
    }
    let eq = SchwarzianEquation::classical_j();
    let singular = es(classify_singularities(&eq.to_normal_form()))?
        .iter()
        .filter(|p| p.is_singular())
        .count();
    let degree = eq.cleared_polynomial_form().total_degree;
    ensure(degree == 2 * singular + 2 && degree == 8, format!("classical j degree {degree}"))?;
    Ok(format!("total degree 2r+2 (= 8) on all {} triangle equations and classical j", sigs.len()))
}

fn main() {
    let criteria: Vec<(&str, Option<f64>, fn() -> Result<String, String>)> = vec![
        ("normalization identity", Some(1.0), criterion_1_normalization),
        ("ODE verification", Some(10.0), criterion_2_ode_verification),
        ("strong minimality", Some(60.0), criterion_3_strong_minimality),
        ("triangle fast path", Some(5.0), criterion_4_triangle_fast_path),
        ("certificate soundness", None, criterion_5_certificate_soundness),
        ("monodromy", None, criterion_6_monodromy),
        ("special polynomials", Some(60.0), criterion_7_special_polynomials),
        ("degree bounds", Some(1.0), criterion_8_bounds),
        ("schwarzian calculus", None, criterion_9_schwarzian_calculus),
        ("cleared-form degree", None, criterion_10_cleared_form_degree),
    ];
    let mut failures = 0usize;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|detail| match budget {
            Some(limit) if secs >= *limit => {
                Err(format!("took {secs:.2}s, over the {limit:.0}s budget"))
            }
            _ => Ok(detail),
        });
        match outcome {
            Ok(detail) => println!("criterion {n:2} ({name}): PASS in {secs:.2}s  [{detail}]"),
            Err(msg) => {
                failures += 1;
                println!("criterion {n:2} ({name}): FAIL in {secs:.2}s  [{msg}]");
            }
        }
    }
    if failures > 0 {
        println!("acceptance: {failures} of 10 criteria FAILED");
        std::process::exit(1);
    }
    println!("acceptance: all 10 criteria passed");
}
