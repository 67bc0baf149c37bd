//! Wigner small-d elements for the polar part of the sphere displacement.
//!
//! `wigner_small_d(S, m_row, m_col, θ)` is `⟨S, m_row| exp(iθ S_y) |S, m_col⟩`,
//! i.e. the matrix of the displacement `D(θ, 0) = exp(θ/2 (S₊ − S₋))` that
//! carries `|S, −S⟩` to the coherent state `|S; θ, 0⟩`. Basis phases are
//! Condon–Shortley. In the active `exp(−iθ S_y)` convention this is the
//! transposed element `d_{m_col, m_row}(θ)`.
//!
//! Elements are evaluated through the Jacobi-polynomial form
//! `d = ± sqrt(binom ratio) sin^a(θ/2) cos^b(θ/2) P_k^{(a,b)}(cos θ)` with the
//! three-term recurrence for `P_k^{(a,b)}`. The alternating finite sum loses
//! ~1e-10 to cancellation by 2S = 40; the recurrence stays at ~1e-14.

use nalgebra::DMatrix;

use super::factorial::ln_factorial;
use super::HalfInteger;
use crate::error::{Error, Result};

/// `⟨S, m_row| exp(iθ S_y) |S, m_col⟩`.
pub fn wigner_small_d(
    s: HalfInteger,
    m_row: HalfInteger,
    m_col: HalfInteger,
    theta: f64,
) -> Result<f64> {
    check_projection(s, m_row)?;
    check_projection(s, m_col)?;
    Ok(active_d(s, m_col, m_row, theta))
}

/// Full `(2S+1) × (2S+1)` matrix of [`wigner_small_d`], rows and columns in
/// descending `m` order.
pub fn wigner_small_d_matrix(s: HalfInteger, theta: f64) -> DMatrix<f64> {
    let dim = s.multiplicity();
    DMatrix::from_fn(dim, dim, |r, c| {
        active_d(s, s.projection_at(c), s.projection_at(r), theta)
    })
}

fn check_projection(s: HalfInteger, m: HalfInteger) -> Result<()> {
    if s.twice() < 0 || s.index_of(m).is_none() {
        return Err(Error::Domain(format!(
            "projection {m} is not a member of the spin-{s} multiplet"
        )));
    }
    Ok(())
}

/// Active-convention `d^j_{m'm}(β) = ⟨j m'| exp(−iβ J_y) |j m⟩`.
fn active_d(j: HalfInteger, mp: HalfInteger, m: HalfInteger, beta: f64) -> f64 {
    // Work in doubled units throughout; every combination below is even.
    let (tj, tmp, tm) = (j.twice(), mp.twice(), m.twice());
    let candidates = [tj + tm, tj - tm, tj + tmp, tj - tmp];
    let tk = *candidates.iter().min().unwrap();
    let (ta, tlambda) = if tk == tj + tm {
        (tmp - tm, tmp - tm)
    } else if tk == tj - tm || tk == tj + tmp {
        (tm - tmp, 0)
    } else {
        (tmp - tm, tmp - tm)
    };
    let k = (tk / 2) as u64;
    let a = (ta / 2) as u64;
    let b = ((2 * tj - 2 * tk - ta) / 2) as u64;
    let two_j = tj as u64;
    let lambda = tlambda / 2;

    // sqrt(binom(2j-k, k+a) / binom(k+b, b))
    let ln_pref = 0.5
        * (ln_factorial(two_j - k) - ln_factorial(k + a) - ln_factorial(two_j - 2 * k - a))
        - 0.5 * (ln_factorial(k + b) - ln_factorial(b) - ln_factorial(k));
    let half = 0.5 * beta;
    let (sin_h, cos_h) = half.sin_cos();
    let sign = if lambda.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * ln_pref.exp()
        * powu(sin_h, a)
        * powu(cos_h, b)
        * jacobi(k, a as f64, b as f64, beta.cos())
}

fn powu(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by upward recurrence in degree.
pub(crate) fn jacobi(n: u64, alpha: f64, beta: f64, x: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + alpha + beta;
        let c1 = 2.0 * k * (k + alpha + beta) * (s - 2.0);
        let c2 = (s - 1.0) * (alpha * alpha - beta * beta);
        let c3 = (s - 2.0) * (s - 1.0) * s;
        let c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * s;
        let next = ((c2 + c3 * x) * p - c4 * p_prev) / c1;
        p_prev = p;
        p = next;
    }
    p
}
