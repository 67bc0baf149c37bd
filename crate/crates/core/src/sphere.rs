//! Product quadrature on the unit sphere: Gauss–Legendre in `cos θ` times
//! the uniform (trapezoidal) rule in `φ`.
//!
//! With `n_θ` Legendre nodes and `n_φ` azimuthal nodes the rule integrates
//! `Y_Kq Y*_K'q'` exactly whenever `K + K' ≤ min(2n_θ − 1, n_φ − 1)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// One quadrature node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// A product grid whose nodes are ordered θ-major, θ ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    thetas: Vec<f64>,
    cos_weights: Vec<f64>,
    phis: Vec<f64>,
    exact_degree: u32,
}

/// Raised when a grid cannot integrate the requested quantity exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridTooCoarse {
    pub exact_degree: u32,
    pub required_degree: u32,
}

impl std::fmt::Display for GridTooCoarse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "grid is exact to degree {} but degree {} is required",
            self.exact_degree, self.required_degree
        )
    }
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Domain(format!(
                "grid needs at least one node per axis, got {n_theta}x{n_phi}"
            )));
        }
        let (nodes, weights) = gauss_legendre(n_theta);
        // θ ascending is cos θ descending.
        let thetas = nodes.iter().rev().map(|&x| x.clamp(-1.0, 1.0).acos()).collect();
        let cos_weights = weights.into_iter().rev().collect();
        let phis = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let exact_degree = ((2 * n_theta - 1) as u32).min((n_phi - 1) as u32);
        Ok(SphereGrid { thetas, cos_weights, phis, exact_degree })
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn len(&self) -> usize {
        self.thetas.len() * self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Largest `K + K'` for which `∫ Y_Kq Y*_K'q'` is exact.
    pub fn exact_degree(&self) -> u32 {
        self.exact_degree
    }

    pub fn node(&self, index: usize) -> GridNode {
        let i = index / self.phis.len();
        let j = index % self.phis.len();
        GridNode {
            theta: self.thetas[i],
            phi: self.phis[j],
            weight: self.cos_weights[i] * 2.0 * PI / self.phis.len() as f64,
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = GridNode> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes().map(|n| n.weight).sum()
    }

    /// `Σ w_i f_i` over node values in [`nodes`](Self::nodes) order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.nodes().zip(values).map(|(n, v)| n.weight * v).sum()
    }

    /// `None` when the grid is exact to `required_degree`.
    pub fn check_degree(&self, required_degree: u32) -> Option<GridTooCoarse> {
        (self.exact_degree < required_degree).then_some(GridTooCoarse {
            exact_degree: self.exact_degree,
            required_degree,
        })
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]` by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
