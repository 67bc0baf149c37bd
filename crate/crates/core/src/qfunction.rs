//! The SU(2) Q function of a polarization state and its multipole
//! decomposition.
//!
//! Coherent states are `|S; θ, φ⟩ = D(θ, φ)|S, −S⟩` with
//! `D = exp(ξS₊ − ξ*S₋)`, `ξ = (θ/2)e^{−iφ}`, which gives
//!
//! ```text
//! ⟨S, m|S; θ, φ⟩ = sqrt(binom(2S, S+m)) cos^{S−m}(θ/2) sin^{S+m}(θ/2) e^{−i(S+m)φ}.
//! ```
//!
//! That state points along the Bloch direction `n(θ, φ) = (π − θ, φ)`, so the
//! multipole route evaluates harmonics there:
//!
//! ```text
//! Q^(S)(θ, φ) = sqrt(4π/(2S+1)) Σ_{K,q} C^{SS}_{SS,K0} ρ_Kq^(S) Y_Kq(π − θ, φ)
//! Q(θ, φ)     = Σ_S (2S+1)/(4π) Q^(S)(θ, φ) = Σ_K Q_K(θ, φ)
//! Q_K(θ, φ)   = Σ_S sqrt((2S+1)/(4π)) C^{SS}_{SS,K0} Σ_q ρ_Kq^(S) Y_Kq(π − θ, φ)
//! ```
//!
//! `Y_Kq(π − θ, φ) = (−1)^{K+q} Y_Kq(θ, φ)`; both routes agree to rounding.
//! With these weights `∫ Q dΩ = 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::angular::{cg_stretched, wigner_small_d_matrix, HalfInteger, HarmonicTable};
use crate::error::{Error, Result};
use crate::multipole::{extract_multipoles, MultipoleTable};
use crate::sphere::{GridTooCoarse, SphereGrid};
use crate::state::{PolarizationState, PSD_TOLERANCE};

/// Negative Q values closer to zero than this are rounding noise.
pub const Q_CLAMP_TOLERANCE: f64 = 1e-12;

/// Components of `|S; θ, φ⟩` in the descending `|S, m⟩` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentAmplitudes {
    pub spin: HalfInteger,
    pub theta: f64,
    pub phi: f64,
    amps: Vec<Complex64>,
}

impl CoherentAmplitudes {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨S, m|S; θ, φ⟩`.
    pub fn get(&self, m: HalfInteger) -> Option<Complex64> {
        self.spin.index_of(m).map(|i| self.amps[i])
    }
}

/// `amps(m) = d^S_{m,−S}(θ) e^{−i(S+m)φ}`, with `d` the matrix of
/// `exp(iθS_y)` from [`wigner_small_d_matrix`].
pub fn coherent_amplitudes(spin: HalfInteger, theta: f64, phi: f64) -> Result<CoherentAmplitudes> {
    if spin.twice() < 0 {
        return Err(Error::Domain(format!("negative spin {spin}")));
    }
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::Domain("coherent state angles must be finite".into()));
    }
    let d = wigner_small_d_matrix(spin, theta);
    let last = spin.multiplicity() - 1;
    let amps = spin
        .projections()
        .enumerate()
        .map(|(row, m)| {
            let s_plus_m = 0.5 * (spin + m).twice() as f64;
            Complex64::from_polar(d[(row, last)], -s_plus_m * phi)
        })
        .collect();
    Ok(CoherentAmplitudes { spin, theta, phi, amps })
}

/// Bloch direction `(θ_n, φ_n)` of `|S; θ, φ⟩`.
#[inline]
pub fn bloch_direction(theta: f64, phi: f64) -> (f64, f64) {
    (PI - theta, phi)
}

/// Chart point `(θ, φ)` whose coherent state points along the unit vector.
pub fn chart_point_of(direction: [f64; 3]) -> (f64, f64) {
    let [x, y, z] = direction;
    let r = (x * x + y * y + z * z).sqrt();
    let theta_n = (z / r).clamp(-1.0, 1.0).acos();
    let phi_n = y.atan2(x).rem_euclid(2.0 * PI);
    (PI - theta_n, phi_n)
}

/// Unit vector of the Bloch direction of `|S; θ, φ⟩`.
pub fn bloch_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    [st * phi.cos(), st * phi.sin(), -ct]
}

/// Harmonics `Y_Kq(π − θ, φ)` for every `K ≤ k_max`.
pub fn chart_harmonics(k_max: u32, theta: f64, phi: f64) -> HarmonicTable {
    let (tn, pn) = bloch_direction(theta, phi);
    HarmonicTable::new(k_max, tn, pn)
}

fn clamp_q(value: f64, trace: f64) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value);
    }
    // Valid blocks may carry eigenvalues down to −PSD_TOLERANCE·trace.
    if -value <= Q_CLAMP_TOLERANCE + PSD_TOLERANCE * trace {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!("Q function value {value:e} is negative")))
    }
}

/// `Q^(S)(θ, φ) = ⟨S; θ, φ| ρ^(S) |S; θ, φ⟩`; zero if the sector is absent.
pub fn q_sector_direct(state: &PolarizationState, spin: HalfInteger, theta: f64, phi: f64) -> Result<f64> {
    let Some(block) = state.sector(spin) else {
        return Ok(0.0);
    };
    let amps = coherent_amplitudes(spin, theta, phi)?;
    let a = amps.amplitudes();
    let rho = block.matrix();
    let n = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for c in 0..n {
            row += rho[(r, c)] * a[c];
        }
        acc += a[r].conj() * row;
    }
    clamp_q(acc.re, block.trace())
}

/// `Q(θ, φ) = Σ_S (2S+1)/(4π) Q^(S)(θ, φ)`.
pub fn q_total(state: &PolarizationState, theta: f64, phi: f64) -> Result<f64> {
    let mut total = 0.0;
    for block in state.sectors() {
        let spin = block.spin();
        total += spin.multiplicity() as f64 / (4.0 * PI) * q_sector_direct(state, spin, theta, phi)?;
    }
    Ok(total)
}

/// `Q^(S)` from the multipole expansion.
pub fn q_sector_via_multipoles(table: &MultipoleTable, spin: HalfInteger, theta: f64, phi: f64) -> Result<f64> {
    q_sector_via_multipoles_with(table, spin, theta, phi, &cg_stretched)
}

/// As [`q_sector_via_multipoles`] with the stretched coefficient supplied by
/// the caller.
pub fn q_sector_via_multipoles_with(
    table: &MultipoleTable,
    spin: HalfInteger,
    theta: f64,
    phi: f64,
    stretched: &dyn Fn(HalfInteger, u32) -> Result<f64>,
) -> Result<f64> {
    let Some(sector) = table.sector(spin) else {
        return Ok(0.0);
    };
    if !sector.is_complete() {
        let missing = ((sector.k_max() + 1)..=spin.twice() as u32).map(|k| (spin, k)).collect();
        return Err(Error::IncompleteTable { missing });
    }
    let harmonics = chart_harmonics(sector.k_max(), theta, phi);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=sector.k_max() {
        let c = stretched(spin, k)?;
        let rank = sector.rank(k).expect("complete sector");
        let partial: Complex64 = rank.iter().zip(harmonics.degree(k)).map(|(r, y)| r * y).sum();
        acc += partial * c;
    }
    Ok((4.0 * PI / spin.multiplicity() as f64).sqrt() * acc.re)
}

/// Per-rank coefficients `a_Kq = Σ_S sqrt((2S+1)/(4π)) C^{SS}_{SS,K0} ρ_Kq^(S)`
/// so that `Q_K = Re Σ_q a_Kq Y_Kq(π − θ, φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCoefficients {
    k_max: u32,
    coeffs: Vec<Vec<Complex64>>,
}

impl ComponentCoefficients {
    /// Sectors with `2S < K` contribute nothing to rank `K`. Every sector
    /// with `2S ≥ K` must store rank `K`.
    pub fn from_table(table: &MultipoleTable, k_max: u32) -> Result<Self> {
        let mut missing = Vec::new();
        let mut coeffs: Vec<Vec<Complex64>> =
            (0..=k_max).map(|k| vec![Complex64::new(0.0, 0.0); (2 * k + 1) as usize]).collect();
        for sector in table.sectors() {
            let spin = sector.spin();
            let weight = (spin.multiplicity() as f64 / (4.0 * PI)).sqrt();
            let top = k_max.min(spin.twice() as u32);
            for k in 0..=top {
                match sector.rank(k) {
                    Some(rank) => {
                        let c = weight * cg_stretched(spin, k)?;
                        for (acc, r) in coeffs[k as usize].iter_mut().zip(rank) {
                            *acc += r * c;
                        }
                    }
                    None => missing.push((spin, k)),
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteTable { missing });
        }
        Ok(ComponentCoefficients { k_max, coeffs })
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// `a_K,-K … a_K,K`.
    pub fn rank(&self, k: u32) -> &[Complex64] {
        &self.coeffs[k as usize]
    }

    /// `Q_K` from precomputed harmonics at the chart point.
    pub fn component(&self, k: u32, harmonics: &HarmonicTable) -> f64 {
        if k > self.k_max {
            return 0.0;
        }
        self.coeffs[k as usize]
            .iter()
            .zip(harmonics.degree(k))
            .map(|(a, y)| (a * y).re)
            .sum()
    }
}

/// `Q_K(θ, φ)` from a multipole table.
pub fn q_component(table: &MultipoleTable, k: u32, theta: f64, phi: f64) -> Result<f64> {
    let coeffs = ComponentCoefficients::from_table(table, k)?;
    Ok(coeffs.component(k, &chart_harmonics(k, theta, phi)))
}

/// `Q_K(θ, φ)` of a state.
pub fn q_component_of_state(state: &PolarizationState, k: u32, theta: f64, phi: f64) -> Result<f64> {
    q_component(&extract_multipoles(state, Some(k))?, k, theta, phi)
}

/// `Q` and its components `Q_0 … Q_{k_max}` sampled on a grid.
#[derive(Clone, Debug)]
pub struct QField {
    pub grid: SphereGrid,
    pub k_max: u32,
    /// `Q` at every node, in grid order.
    pub total: Vec<f64>,
    /// `components[K][node] = Q_K`.
    pub components: Vec<Vec<f64>>,
    /// Set when the grid cannot integrate `Q²` exactly.
    pub warning: Option<GridTooCoarse>,
}

impl QField {
    pub fn component(&self, k: u32) -> Option<&[f64]> {
        self.components.get(k as usize).map(Vec::as_slice)
    }

    /// Largest `|Q − Σ_K Q_K|` over the nodes.
    pub fn resummation_residual(&self) -> f64 {
        (0..self.total.len())
            .map(|i| {
                let sum: f64 = self.components.iter().map(|c| c[i]).sum();
                (self.total[i] - sum).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Per-rank values keyed by `K`.
    pub fn components_by_rank(&self) -> BTreeMap<u32, &[f64]> {
        self.components.iter().enumerate().map(|(k, v)| (k as u32, v.as_slice())).collect()
    }
}

/// Samples `Q` (direct route) and `Q_K` for `K ≤ k_max` at every grid node.
/// `k_max` defaults to `2S_max`.
pub fn evaluate_field(state: &PolarizationState, grid: &SphereGrid, k_max: Option<u32>) -> Result<QField> {
    let two_s_max = state.max_spin().twice() as u32;
    let k_max = k_max.unwrap_or(two_s_max);
    let table = extract_multipoles(state, Some(k_max))?;
    let coeffs = ComponentCoefficients::from_table(&table, k_max)?;
    let warning = grid.check_degree(2 * two_s_max);

    let per_node: Vec<(f64, Vec<f64>)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let node = grid.node(i);
            let total = q_total(state, node.theta, node.phi)?;
            let harmonics = chart_harmonics(k_max, node.theta, node.phi);
            let comps = (0..=k_max).map(|k| coeffs.component(k, &harmonics)).collect();
            Ok((total, comps))
        })
        .collect::<Result<_>>()?;

    let mut total = Vec::with_capacity(grid.len());
    let mut components = vec![Vec::with_capacity(grid.len()); k_max as usize + 1];
    for (t, comps) in per_node {
        total.push(t);
        for (k, v) in comps.into_iter().enumerate() {
            components[k].push(v);
        }
    }
    Ok(QField { grid: grid.clone(), k_max, total, components, warning })
}
