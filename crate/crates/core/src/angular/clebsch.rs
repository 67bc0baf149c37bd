//! Clebsch–Gordan coefficients.
//!
//! The general coefficient is evaluated from the Racah closed form in exact
//! rational arithmetic: the result is `sign · sqrt(p / q)` with `p`, `q`
//! big integers, and only the final square root is taken in floating point.
//! The stretched coefficient `C^{SS}_{SS,K0}` has a product form and is
//! evaluated in log space.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::factorial::{factorial_ref, ln_factorial};
use super::HalfInteger;
use crate::error::{Error, Result};

/// Largest factorial argument the exact evaluation accepts.
pub const EXACT_FACTORIAL_LIMIT: u64 = 4096;

/// Arguments of `C^{J M}_{j1 m1, j2 m2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CgArgs {
    pub j1: HalfInteger,
    pub m1: HalfInteger,
    pub j2: HalfInteger,
    pub m2: HalfInteger,
    pub j: HalfInteger,
    pub m: HalfInteger,
}

impl CgArgs {
    pub fn new(
        j1: HalfInteger,
        m1: HalfInteger,
        j2: HalfInteger,
        m2: HalfInteger,
        j: HalfInteger,
        m: HalfInteger,
    ) -> Self {
        CgArgs { j1, m1, j2, m2, j, m }
    }

    /// Angular-momentum coupling rules, including integrality of every
    /// `j ± m` and of `j1 + j2 + J`.
    pub fn is_allowed(&self) -> bool {
        let (j1, m1, j2, m2, j, m) = (
            self.j1.twice(),
            self.m1.twice(),
            self.j2.twice(),
            self.m2.twice(),
            self.j.twice(),
            self.m.twice(),
        );
        j1 >= 0
            && j2 >= 0
            && j >= 0
            && m == m1 + m2
            && m1.abs() <= j1
            && m2.abs() <= j2
            && m.abs() <= j
            && (j1 + m1) % 2 == 0
            && (j2 + m2) % 2 == 0
            && (j + m) % 2 == 0
            && (j1 + j2 + j) % 2 == 0
            && (j1 - j2).abs() <= j
            && j <= j1 + j2
    }
}

/// `C^{J M}_{j1 m1, j2 m2}` in the Condon–Shortley convention.
///
/// Returns exactly `0.0` when the coupling rules fail.
pub fn clebsch_gordan(args: CgArgs) -> Result<f64> {
    if !args.is_allowed() {
        return Ok(0.0);
    }
    let (sign, p, q) = clebsch_gordan_squared(args)?;
    Ok(sign * ratio_to_f64(&p, &q).sqrt())
}

/// Shorthand for [`clebsch_gordan`] with the arguments in the usual order.
pub fn cg(
    j1: HalfInteger,
    m1: HalfInteger,
    j2: HalfInteger,
    m2: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<f64> {
    clebsch_gordan(CgArgs::new(j1, m1, j2, m2, j, m))
}

/// Exact form of an allowed coefficient: `(sign, p, q)` with
/// `C = sign * sqrt(p / q)`.
pub fn clebsch_gordan_squared(args: CgArgs) -> Result<(f64, BigUint, BigUint)> {
    debug_assert!(args.is_allowed());
    // All of these are non-negative integers once the rules hold.
    let half = |x: i32| -> i64 { (x / 2) as i64 };
    let (j1, m1, j2, m2, j, m) = (
        args.j1.twice(),
        args.m1.twice(),
        args.j2.twice(),
        args.m2.twice(),
        args.j.twice(),
        args.m.twice(),
    );
    let a = half(j1 + j2 - j);
    let b = half(j1 - j2 + j);
    let c = half(-j1 + j2 + j);
    let d = half(j1 + j2 + j) + 1;
    let j_plus_m = half(j + m);
    let j_minus_m = half(j - m);
    let j1_minus_m1 = half(j1 - m1);
    let j1_plus_m1 = half(j1 + m1);
    let j2_minus_m2 = half(j2 - m2);
    let j2_plus_m2 = half(j2 + m2);
    // J - j2 + m1 and J - j1 - m2
    let e = half(j - j2 + m1);
    let f = half(j - j1 - m2);

    if d as u64 > EXACT_FACTORIAL_LIMIT {
        return Err(Error::Overflow {
            arg: d as u64,
            limit: EXACT_FACTORIAL_LIMIT,
        });
    }

    let fact = |n: i64| factorial_ref(n as u64);

    let mut prefactor = BigUint::from((j + 1) as u64);
    for n in [a, b, c, j_plus_m, j_minus_m, j1_minus_m1, j1_plus_m1, j2_minus_m2, j2_plus_m2] {
        prefactor *= fact(n).as_ref();
    }
    let denominator = fact(d).into_owned();

    let k_min = 0.max(-e).max(-f);
    let k_max = a.min(j1_minus_m1).min(j2_plus_m2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let mut den = BigUint::from(1u32);
        for n in [k, a - k, j1_minus_m1 - k, j2_plus_m2 - k, e + k, f + k] {
            den *= fact(n).as_ref();
        }
        let numer = if k % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        sum += BigRational::new(numer, BigInt::from_biguint(Sign::Plus, den));
    }

    let sign = match sum.numer().sign() {
        Sign::Minus => -1.0,
        Sign::Plus => 1.0,
        Sign::NoSign => return Ok((0.0, BigUint::zero(), BigUint::from(1u32))),
    };
    let sum_num = sum.numer().magnitude();
    let sum_den = sum.denom().magnitude();
    let p = prefactor * sum_num * sum_num;
    let q = denominator * sum_den * sum_den;
    Ok((sign, p, q))
}

/// Correctly scaled `p / q` as `f64` for arbitrarily large operands.
pub(crate) fn ratio_to_f64(p: &BigUint, q: &BigUint) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries 64-65 significant bits.
    let shift = q.bits() as i64 - p.bits() as i64 + 64;
    let quotient = if shift >= 0 {
        (p << shift as u64) / q
    } else {
        p / (q << (-shift) as u64)
    };
    let mantissa = quotient.to_f64().unwrap_or(f64::INFINITY);
    scale_by_pow2(mantissa, -shift)
}

fn scale_by_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

/// `C^{SS}_{SS,K0} = sqrt(2S+1) (2S)! / sqrt((2S-K)! (2S+1+K)!)`.
pub fn cg_stretched(s: HalfInteger, k: u32) -> Result<f64> {
    let two_s = s.twice();
    if two_s < 0 || k as i64 > two_s as i64 {
        return Err(Error::Domain(format!(
            "stretched coefficient needs 0 <= K <= 2S, got S = {s}, K = {k}"
        )));
    }
    let n = two_s as u64;
    let k = k as u64;
    let ln = 0.5 * ((n + 1) as f64).ln() + ln_factorial(n)
        - 0.5 * (ln_factorial(n - k) + ln_factorial(n + 1 + k));
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

    #[test]
    fn singlet_coefficient() {
        let c = cg(h(1), h(1), h(1), h(-1), h(0), h(0)).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        let c = cg(h(1), h(-1), h(1), h(1), h(0), h(0)).unwrap();
        assert!((c + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn coupling_with_spin_zero_is_identity() {
        for two_s in 0..8 {
            for m in h(two_s).projections() {
                for mm in h(two_s).projections() {
                    let c = cg(h(two_s), m, h(0), h(0), h(two_s), mm).unwrap();
                    assert_eq!(c, if m == mm { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn quadrupole_coefficient_for_spin_one() {
        let c = cg(h(2), h(0), h(4), h(0), h(2), h(0)).unwrap();
        assert!((c - (-2.0 / 10f64.sqrt())).abs() < 1e-15);
        assert!((c - -0.6324555320336759).abs() < 1e-15);
    }

    #[test]
    fn forbidden_couplings_are_exact_zero() {
        // M != m1 + m2
        assert_eq!(cg(h(2), h(2), h(2), h(0), h(2), h(0)).unwrap(), 0.0);
        // triangle violation
        assert_eq!(cg(h(2), h(0), h(2), h(0), h(6), h(0)).unwrap(), 0.0);
        // |m| > j
        assert_eq!(cg(h(1), h(3), h(1), h(-1), h(2), h(2)).unwrap(), 0.0);
        // parity-forbidden j1 + j2 + J half-odd
        assert_eq!(cg(h(1), h(1), h(2), h(0), h(2), h(1)).unwrap(), 0.0);
        // C^{10}_{10,10} vanishes by the Racah sum itself
        assert_eq!(cg(h(2), h(0), h(2), h(0), h(2), h(0)).unwrap(), 0.0);
    }

    #[test]
    fn stretched_examples() {
        let s = h(2);
        assert!((cg_stretched(s, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cg_stretched(s, 1).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cg_stretched(s, 2).unwrap() - 0.31622776601683794).abs() < 1e-15);
        assert!(matches!(cg_stretched(s, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn stretched_matches_racah() {
        for two_s in 0..=40 {
            let s = h(two_s);
            for k in 0..=two_s as u32 {
                let closed = cg_stretched(s, k).unwrap();
                let racah = cg(s, s, HalfInteger::from_int(k as i32), h(0), s, s).unwrap();
                assert!(
                    ((closed - racah) / racah).abs() < 1e-12,
                    "2S={two_s} K={k}: {closed} vs {racah}"
                );
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let big = h(5000);
        let err = cg(big, big, big, -big, h(0), h(0)).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn ratio_conversion_handles_huge_operands() {
        let p = factorial_ref(300).into_owned();
        let q = factorial_ref(301).into_owned();
        assert!((ratio_to_f64(&p, &q) - 1.0 / 301.0).abs() < 1e-18);
        assert!((ratio_to_f64(&q, &p) - 301.0).abs() < 1e-12);
    }
}
