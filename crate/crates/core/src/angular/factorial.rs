//! Factorials, in log space for floating-point kernels and exactly for the
//! rational Clebsch–Gordan evaluation.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

/// Size of the cached `ln(n!)` table.
const LN_TABLE_LEN: usize = 10_001;

/// Size of the cached exact factorial table.
const EXACT_TABLE_LEN: usize = 512;

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_TABLE_LEN);
        // Neumaier-compensated running sum of ln k.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        table.push(0.0);
        for k in 1..LN_TABLE_LEN {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `ln(n!)` by cumulative summation of logarithms.
pub fn ln_factorial(n: u64) -> f64 {
    let table = ln_table();
    if (n as usize) < table.len() {
        return table[n as usize];
    }
    let mut sum = table[table.len() - 1];
    let mut comp = 0.0;
    for k in table.len() as u64..=n {
        let term = (k as f64).ln();
        let t = sum + term;
        comp += (sum - t) + term;
        sum = t;
    }
    sum + comp
}

/// `ln binom(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn exact_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(EXACT_TABLE_LEN);
        let mut acc = BigUint::one();
        table.push(acc.clone());
        for k in 1..EXACT_TABLE_LEN as u64 {
            acc *= k;
            table.push(acc.clone());
        }
        table
    })
}

/// Exact `n!`.
pub fn factorial_exact(n: u64) -> BigUint {
    let table = exact_table();
    if (n as usize) < table.len() {
        return table[n as usize].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for k in table.len() as u64..=n {
        acc *= k;
    }
    acc
}

/// Borrowing variant for the cached range.
pub(crate) fn factorial_ref(n: u64) -> std::borrow::Cow<'static, BigUint> {
    let table = exact_table();
    match table.get(n as usize) {
        Some(v) => std::borrow::Cow::Borrowed(v),
        None => std::borrow::Cow::Owned(factorial_exact(n)),
    }
}
