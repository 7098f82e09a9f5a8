//! Effective degree bounds as exact big integers.
//!
//! Both bounds are doubly exponential closed forms, so a naive evaluation can
//! try to materialize numbers with astronomically many bits. Every entry
//! point first bounds the bit length of the result and refuses to compute
//! past [`BIT_LIMIT`]; below the limit everything is exact big-integer
//! arithmetic with no floating shortcuts.

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};

use crate::{Error, Result};

/// Hard ceiling on the bit length of a materialized bound (about 315 000
/// decimal digits). Inputs past this are reported, not computed.
pub const BIT_LIMIT: u64 = 1 << 20;

/// Input data for the prolongation-space degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInput {
    /// Degree of the variety X.
    pub deg_x: u64,
    /// Degree of the defining system S.
    pub deg_s: u64,
    /// Ambient dimension.
    pub m: u32,
    /// Prolongation order.
    pub ell: u32,
}

/// `base^exp` with the bit-length guard.
fn checked_pow(base: &BigUint, exp: &BigUint) -> Result<BigUint> {
    if base.is_one() {
        return Ok(BigUint::one());
    }
    if &(BigUint::from(base.bits()) * exp) > &BigUint::from(BIT_LIMIT) {
        return Err(Error::BoundTooLarge { limit_bits: BIT_LIMIT });
    }
    let e = exp.to_u64().expect("guarded exponent fits u64");
    Ok(Pow::pow(base, e))
}

/// Degree bound for the Zariski closure of the solution set:
/// `deg(X)^(l 2^(m l)) * deg(S)^(2^(m l) - 1)`.
pub fn zariski_closure_bound(input: &BoundInput) -> Result<BigUint> {
    let BoundInput { deg_x, deg_s, m, ell } = *input;
    if deg_x == 0 || deg_s == 0 || m == 0 || ell == 0 {
        return Err(Error::Invalid(
            "degree bound inputs must all be positive".into(),
        ));
    }
    if deg_x == 1 && deg_s == 1 {
        return Ok(BigUint::one());
    }
    let me = (m as u64) * (ell as u64);
    // With any base >= 2 the result has at least 2^(m l) - 1 bits, so past
    // this point the precise guard below could not pass anyway; checking
    // first keeps the exponent itself from exhausting memory.
    if me > 40 {
        return Err(Error::BoundTooLarge { limit_bits: BIT_LIMIT });
    }
    let two_me = BigUint::one() << me;
    let e_x = BigUint::from(ell as u64) * &two_me;
    let e_s = &two_me - BigUint::one();
    let x = checked_pow(&BigUint::from(deg_x), &e_x)?;
    let s = checked_pow(&BigUint::from(deg_s), &e_s)?;
    Ok(x * s)
}

/// Degree bound in the André–Pink case: `((2r+2)^n * deg(V))^(2^(3n) - 1)`.
pub fn andre_pink_bound(r: u64, n: u32, deg_v: u64) -> Result<BigUint> {
    if r < 3 {
        return Err(Error::Invalid(format!("generator count r must be at least 3, got {r}")));
    }
    if n == 0 || deg_v == 0 {
        return Err(Error::Invalid(
            "ambient power n and deg V must be positive".into(),
        ));
    }
    // Base >= 8, so the result has at least 3 (2^(3n) - 1) bits.
    if 3 * (n as u64) > 40 {
        return Err(Error::BoundTooLarge { limit_bits: BIT_LIMIT });
    }
    let base = Pow::pow(&BigUint::from(2 * r + 2), n as u64) * BigUint::from(deg_v);
    let exp = (BigUint::one() << (3 * n as u64)) - BigUint::one();
    checked_pow(&base, &exp)
}

/// Number of decimal digits; pairs every printed bound with its size.
pub fn digit_count(x: &BigUint) -> usize {
    x.to_str_radix(10).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn input(deg_x: u64, deg_s: u64, m: u32, ell: u32) -> BoundInput {
        BoundInput { deg_x, deg_s, m, ell }
    }

    /// Independent oracle: repeated multiplication, no pow calls.
    fn slow_pow(base: u64, exp: u64) -> BigUint {
        let mut acc = BigUint::one();
        let b = BigUint::from(base);
        for _ in 0..exp {
            acc *= &b;
        }
        acc
    }

    #[test]
    fn zariski_closed_form_examples() {
        assert_eq!(zariski_closure_bound(&input(2, 3, 1, 1)).unwrap(), BigUint::from(12u32));
        // deg X = 1 collapses to deg(S)^(2^(m l) - 1).
        for (s, m, ell) in [(3u64, 1u32, 2u32), (5, 2, 1), (7, 1, 3)] {
            let e = (1u64 << (m as u64 * ell as u64)) - 1;
            assert_eq!(zariski_closure_bound(&input(1, s, m, ell)).unwrap(), slow_pow(s, e));
        }
        let big = zariski_closure_bound(&input(3, 2, 2, 3)).unwrap();
        assert_eq!(big, slow_pow(3, 192) * slow_pow(2, 63));
        // Logarithm cross-check of the size: 192 log10 3 + 63 log10 2.
        let digits = (192.0 * 3f64.log10() + 63.0 * 2f64.log10()).floor() as usize + 1;
        assert_eq!(digit_count(&big), digits);
        assert_eq!(digit_count(&big), 111);
    }

    #[test]
    fn andre_pink_closed_form_examples() {
        let small = andre_pink_bound(3, 1, 1).unwrap();
        assert_eq!(small, BigUint::from(2097152u64));
        assert_eq!(small, slow_pow(8, 7));
        let big = andre_pink_bound(3, 2, 1).unwrap();
        assert_eq!(big, slow_pow(64, 63));
        assert_eq!(digit_count(&big), 114);
        for r in 3..10u64 {
            assert_eq!(andre_pink_bound(r, 1, 1).unwrap(), slow_pow(2 * r + 2, 7));
        }
    }

    #[test]
    fn randomized_agreement_with_the_pow_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let deg_x = rng.gen_range(1u64..=6);
            let deg_s = rng.gen_range(1u64..=6);
            let m = rng.gen_range(1u32..=2);
            let ell = rng.gen_range(1u32..=2);
            let me = m as u64 * ell as u64;
            let expected =
                slow_pow(deg_x, ell as u64 * (1 << me)) * slow_pow(deg_s, (1 << me) - 1);
            assert_eq!(zariski_closure_bound(&input(deg_x, deg_s, m, ell)).unwrap(), expected);
        }
        for _ in 0..20 {
            let r = rng.gen_range(3u64..=6);
            let n = rng.gen_range(1u32..=2);
            let d = rng.gen_range(1u64..=4);
            let base = slow_pow(2 * r + 2, n as u64) * BigUint::from(d);
            let mut expected = BigUint::one();
            for _ in 0..(1u64 << (3 * n as u64)) - 1 {
                expected *= &base;
            }
            assert_eq!(andre_pink_bound(r, n, d).unwrap(), expected);
        }
    }

    #[test]
    fn strict_monotonicity_above_base_one() {
        let base = zariski_closure_bound(&input(2, 2, 1, 1)).unwrap();
        assert!(zariski_closure_bound(&input(3, 2, 1, 1)).unwrap() > base);
        assert!(zariski_closure_bound(&input(2, 3, 1, 1)).unwrap() > base);
        assert!(zariski_closure_bound(&input(2, 2, 2, 1)).unwrap() > base);
        assert!(zariski_closure_bound(&input(2, 2, 1, 2)).unwrap() > base);
        let ap = andre_pink_bound(3, 1, 2).unwrap();
        assert!(andre_pink_bound(4, 1, 2).unwrap() > ap);
        assert!(andre_pink_bound(3, 2, 2).unwrap() > ap);
        assert!(andre_pink_bound(3, 1, 3).unwrap() > ap);
    }

    #[test]
    fn oversized_and_invalid_inputs_are_refused() {
        assert!(matches!(
            zariski_closure_bound(&input(2, 2, 10, 10)),
            Err(Error::BoundTooLarge { .. })
        ));
        assert!(matches!(andre_pink_bound(3, 20, 1), Err(Error::BoundTooLarge { .. })));
        assert!(matches!(zariski_closure_bound(&input(0, 2, 1, 1)), Err(Error::Invalid(_))));
        assert!(matches!(zariski_closure_bound(&input(2, 2, 0, 1)), Err(Error::Invalid(_))));
        assert!(matches!(andre_pink_bound(2, 1, 1), Err(Error::Invalid(_))));
        assert!(matches!(andre_pink_bound(3, 1, 0), Err(Error::Invalid(_))));
        // All-ones input is exactly 1 no matter how deep the tower goes.
        assert!(zariski_closure_bound(&input(1, 1, 30, 30)).unwrap().is_one());
    }
}
