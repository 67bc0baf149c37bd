//! Spherical harmonics with the Condon–Shortley phase.
//!
//! The normalized associated Legendre part is built by the standard stable
//! scheme: the sectoral seed `P̄_m^m` by a product in `sin θ`, then upward
//! recurrence in degree at fixed order.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `Y_Kq(θ, φ)`.
pub fn spherical_harmonic(k: u32, q: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if q.unsigned_abs() > k {
        return Err(Error::Domain(format!(
            "spherical harmonic needs |q| <= K, got K = {k}, q = {q}"
        )));
    }
    let order = q.unsigned_abs();
    let p = normalized_legendre(k, order, theta.cos(), theta.sin());
    let y = Complex64::from_polar(p, order as f64 * phi);
    Ok(if q >= 0 {
        y
    } else if order.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    })
}

/// `P̄_l^m(cos θ)` with `Y_lm = P̄_l^m e^{imφ}`, for `m ≥ 0`.
fn normalized_legendre(l: u32, m: u32, x: f64, sin_theta: f64) -> f64 {
    debug_assert!(m <= l);
    let mut pmm = (0.25 / PI).sqrt();
    for i in 1..=m {
        let i = i as f64;
        pmm *= -((2.0 * i + 1.0) / (2.0 * i)).sqrt() * sin_theta;
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut p_prev = pmm;
    let mut p = x * (2.0 * mf + 3.0).sqrt() * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let next = a * (x * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}

/// All `Y_Kq(θ, φ)` with `K ≤ k_max` at one point, stored at
/// `K² + K + q`.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    k_max: u32,
    values: Vec<Complex64>,
}

impl HarmonicTable {
    pub fn new(k_max: u32, theta: f64, phi: f64) -> Self {
        let (sin_t, x) = (theta.sin(), theta.cos());
        let len = ((k_max + 1) * (k_max + 1)) as usize;
        let mut values = vec![Complex64::new(0.0, 0.0); len];
        let mut pmm = (0.25 / PI).sqrt();
        for m in 0..=k_max {
            let mf = m as f64;
            if m > 0 {
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
            }
            let phase = Complex64::from_polar(1.0, mf * phi);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mut store = |l: u32, p: f64| {
                let y = phase * p;
                let base = (l * l + l) as usize;
                values[base + m as usize] = y;
                values[base - m as usize] = y.conj() * sign;
            };
            store(m, pmm);
            if m == k_max {
                break;
            }
            let mut p_prev = pmm;
            let mut p = x * (2.0 * mf + 3.0).sqrt() * pmm;
            store(m + 1, p);
            for l in (m + 2)..=k_max {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm1 = lf - 1.0;
                let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
                let next = a * (x * p - b * p_prev);
                p_prev = p;
                p = next;
                store(l, p);
            }
        }
        HarmonicTable { k_max, values }
    }

    #[inline]
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    #[inline]
    pub fn get(&self, k: u32, q: i32) -> Complex64 {
        debug_assert!(k <= self.k_max && q.unsigned_abs() <= k);
        self.values[((k * k + k) as i64 + q as i64) as usize]
    }

    /// The `2K+1` values `Y_K,-K … Y_K,K`.
    #[inline]
    pub fn degree(&self, k: u32) -> &[Complex64] {
        let start = (k * k) as usize;
        &self.values[start..start + (2 * k + 1) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monopole_is_constant() {
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (3.0, 5.5)] {
            let y = spherical_harmonic(0, 0, t, p).unwrap();
            assert!((y.re - 0.28209479177387814).abs() < 1e-16);
            assert_eq!(y.im, 0.0);
        }
    }

    #[test]
    fn quadrupole_zonal_closed_form() {
        for theta in [0.0, PI / 3.0, PI / 2.0, 2.2] {
            let y = spherical_harmonic(2, 0, theta, 0.7).unwrap();
            let c = theta.cos();
            let expected = (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0);
            assert!((y.re - expected).abs() < 1e-15);
            assert!(y.im.abs() < 1e-16);
        }
    }

    #[test]
    fn dipole_condon_shortley_sign() {
        let y = spherical_harmonic(1, 1, PI / 2.0, 0.0).unwrap();
        assert!((y.re - -0.3454941494713355).abs() < 1e-15);
        let (theta, phi) = (0.9, 1.3);
        let y = spherical_harmonic(1, -1, theta, phi).unwrap();
        let expected = Complex64::from_polar((3.0 / (8.0 * PI)).sqrt() * theta.sin(), -phi);
        assert!((y - expected).norm() < 1e-15);
    }

    #[test]
    fn domain_error_on_order() {
        assert!(matches!(spherical_harmonic(2, 3, 0.1, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn table_agrees_with_pointwise() {
        let (theta, phi) = (1.234, 4.321);
        let table = HarmonicTable::new(30, theta, phi);
        for k in 0..=30u32 {
            for q in -(k as i32)..=k as i32 {
                let a = table.get(k, q);
                let b = spherical_harmonic(k, q, theta, phi).unwrap();
                assert!((a - b).norm() < 1e-14, "K={k} q={q}");
            }
            assert_eq!(table.degree(k).len(), (2 * k + 1) as usize);
        }
    }

    #[test]
    fn stable_at_high_degree() {
        // Addition theorem at coincident points: Σ_q |Y_Kq|² = (2K+1)/4π.
        let table = HarmonicTable::new(200, 0.77, 0.1);
        for k in [50u32, 120, 200] {
            let s: f64 = table.degree(k).iter().map(|y| y.norm_sqr()).sum();
            let expected = (2 * k + 1) as f64 / (4.0 * PI);
            assert!(((s - expected) / expected).abs() < 1e-11, "K={k}: {s} vs {expected}");
        }
    }
}
