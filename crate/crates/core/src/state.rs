//! Polarization states as block-diagonal collections of spin-sector density
//! matrices.
//!
//! A two-mode field with photon numbers `(n_H, n_V)` lives in sector
//! `S = (n_H + n_V)/2` at projection `m = (n_H − n_V)/2`. Within a sector,
//! rows and columns are ordered by descending `m` (`+S` first), so `S₃` is
//! `diag(S, S−1, …, −S)`.
//!
//! Only the blocks diagonal in photon number are kept: coherences between
//! different photon numbers never contribute to a function of the Stokes
//! operators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::angular::{wigner_small_d_matrix, HalfInteger};
use crate::error::{Error, Result};
use crate::qfunction::coherent_amplitudes;

pub type CMatrix = DMatrix<Complex64>;

/// Sectors lighter than this may be dropped by truncating constructors.
pub const DEFAULT_TRUNCATION_EPS: f64 = 1e-12;

/// Allowed deviation of the total trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// Smallest admitted eigenvalue, relative to the block trace.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Allowed Hermiticity defect before a block is rejected, relative to its
/// largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Coherent-state polar angle of horizontally polarized light.
///
/// `n_H = N` is `m = +S`, which the coherent chart `D(θ,φ)|S,−S⟩` reaches at
/// `θ = π`; vertically polarized light sits at `θ = 0`. The azimuth is the
/// phase of `α_V` relative to `α_H`.
pub const H_POLARIZED_THETA: f64 = PI;

/// Row order of every sector matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisOrder {
    /// `m = +S, S−1, …, −S`.
    DescendingM,
}

/// Reduced density block `ρ^(S)` of one spin sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDensityMatrix {
    spin: HalfInteger,
    matrix: CMatrix,
}

impl SectorDensityMatrix {
    pub const BASIS: BasisOrder = BasisOrder::DescendingM;

    /// Validates shape, Hermiticity, trace and positivity. The stored matrix
    /// is the exact Hermitian part of `matrix`.
    pub fn new(spin: HalfInteger, matrix: CMatrix) -> Result<Self> {
        if spin.twice() < 0 {
            return Err(Error::validation("spin", format!("negative spin {spin}")));
        }
        let dim = spin.multiplicity();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::validation(
                "shape",
                format!(
                    "spin {spin} needs a {dim}x{dim} block, got {}x{}",
                    matrix.nrows(),
                    matrix.ncols()
                ),
            ));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("finite", format!("spin {spin} block has non-finite entries")));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > HERMITIAN_TOLERANCE * scale {
            return Err(Error::validation(
                "hermitian",
                format!("spin {spin} block deviates from Hermitian by {defect:e}"),
            ));
        }
        let matrix = hermitian_part(&matrix);
        let block = SectorDensityMatrix { spin, matrix };
        let trace = block.trace();
        if trace < 0.0 {
            return Err(Error::validation("trace", format!("spin {spin} block has trace {trace:e}")));
        }
        let min_eig = block.min_eigenvalue();
        if min_eig < -PSD_TOLERANCE * trace {
            return Err(Error::validation(
                "positive semidefinite",
                format!("spin {spin} block has eigenvalue {min_eig:e}"),
            ));
        }
        Ok(block)
    }

    /// The projector `|ψ⟩⟨ψ|` for an amplitude vector in descending-`m`
    /// order. The block weight is `‖ψ‖²`.
    pub fn pure(spin: HalfInteger, amplitudes: &[Complex64]) -> Result<Self> {
        let dim = spin.multiplicity();
        if amplitudes.len() != dim {
            return Err(Error::validation(
                "shape",
                format!("spin {spin} needs {dim} amplitudes, got {}", amplitudes.len()),
            ));
        }
        let matrix = CMatrix::from_fn(dim, dim, |r, c| amplitudes[r] * amplitudes[c].conj());
        Ok(SectorDensityMatrix { spin, matrix: hermitian_part(&matrix) })
    }

    pub(crate) fn from_parts_unchecked(spin: HalfInteger, matrix: CMatrix) -> Self {
        SectorDensityMatrix { spin, matrix: hermitian_part(&matrix) }
    }

    #[inline]
    pub fn spin(&self) -> HalfInteger {
        self.spin
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `⟨S, m_row| ρ |S, m_col⟩`, or `None` outside the multiplet.
    pub fn entry(&self, m_row: HalfInteger, m_col: HalfInteger) -> Option<Complex64> {
        let r = self.spin.index_of(m_row)?;
        let c = self.spin.index_of(m_col)?;
        Some(self.matrix[(r, c)])
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        SectorDensityMatrix {
            spin: self.spin,
            matrix: self.matrix.map(|z| z * factor),
        }
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = m.clone();
    for r in 0..n {
        out[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
        for c in (r + 1)..n {
            let v = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            out[(r, c)] = v;
            out[(c, r)] = v.conj();
        }
    }
    out
}

/// The block-diagonal polarization sector `⊕_S ρ^(S)`, normalized to unit
/// total trace. The weight of a sector is the trace of its block.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationState {
    sectors: BTreeMap<HalfInteger, SectorDensityMatrix>,
}

impl PolarizationState {
    pub fn sectors(&self) -> impl ExactSizeIterator<Item = &SectorDensityMatrix> {
        self.sectors.values()
    }

    pub fn sector(&self, spin: HalfInteger) -> Option<&SectorDensityMatrix> {
        self.sectors.get(&spin)
    }

    pub fn spins(&self) -> impl Iterator<Item = HalfInteger> + '_ {
        self.sectors.keys().copied()
    }

    /// Largest spin present.
    pub fn max_spin(&self) -> HalfInteger {
        self.sectors.keys().next_back().copied().unwrap_or(HalfInteger::ZERO)
    }

    pub fn weight(&self, spin: HalfInteger) -> f64 {
        self.sectors.get(&spin).map_or(0.0, SectorDensityMatrix::trace)
    }

    pub fn total_trace(&self) -> f64 {
        self.sectors.values().map(SectorDensityMatrix::trace).sum()
    }

    /// `⟨N⟩ / 2 = Σ_S weight(S) · S`.
    pub fn half_mean_photon_number(&self) -> f64 {
        self.sectors.values().map(|b| b.trace() * b.spin().to_f64()).sum()
    }

    /// Applies `D(θ, φ)` sector by sector: `ρ ↦ D ρ D†`.
    pub fn displaced(&self, displacement: Displacement) -> PolarizationState {
        let sectors = self
            .sectors
            .iter()
            .map(|(&spin, block)| {
                let u = displacement.sector_matrix(spin);
                let rotated = &u * block.matrix() * u.adjoint();
                (spin, SectorDensityMatrix::from_parts_unchecked(spin, rotated))
            })
            .collect();
        PolarizationState { sectors }
    }

    fn from_map(sectors: BTreeMap<HalfInteger, SectorDensityMatrix>) -> Self {
        PolarizationState { sectors }
    }
}

/// Builds a state from sector blocks. The blocks' traces must already sum
/// to one; nothing is rescaled here.
pub fn make_state(blocks: Vec<SectorDensityMatrix>) -> Result<PolarizationState> {
    if blocks.is_empty() {
        return Err(Error::validation("trace sum", "no sector blocks given"));
    }
    let mut sectors = BTreeMap::new();
    for block in blocks {
        let spin = block.spin();
        if sectors.insert(spin, block).is_some() {
            return Err(Error::validation("distinct sectors", format!("spin {spin} given twice")));
        }
    }
    let total: f64 = sectors.values().map(SectorDensityMatrix::trace).sum();
    if (total - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::validation("trace sum", format!("sector traces sum to {total}, not 1")));
    }
    Ok(PolarizationState::from_map(sectors))
}

/// The two-mode Fock state `|n_H, n_V⟩ = |S = (n_H+n_V)/2, m = (n_H−n_V)/2⟩`.
pub fn fock_state(n_h: u32, n_v: u32) -> PolarizationState {
    let spin = HalfInteger::from_twice((n_h + n_v) as i32);
    let m = HalfInteger::from_twice(n_h as i32 - n_v as i32);
    let dim = spin.multiplicity();
    let idx = spin.index_of(m).expect("projection inside multiplet");
    let mut matrix = CMatrix::zeros(dim, dim);
    matrix[(idx, idx)] = Complex64::new(1.0, 0.0);
    single_sector(SectorDensityMatrix { spin, matrix })
}

/// Projector onto the SU(2) coherent state `|S; θ, φ⟩ = D(θ, φ)|S, −S⟩`.
pub fn su2_coherent_state(spin: HalfInteger, theta: f64, phi: f64) -> Result<PolarizationState> {
    if spin.twice() < 0 {
        return Err(Error::Domain(format!("negative spin {spin}")));
    }
    let amps = coherent_amplitudes(spin, theta, phi)?;
    Ok(single_sector(SectorDensityMatrix::pure(spin, amps.amplitudes())?))
}

/// `(|N, 0⟩ + e^{iφ}|0, N⟩)/√2` in sector `S = N/2`.
pub fn noon_state(n: u32, relative_phase: f64) -> Result<PolarizationState> {
    if n == 0 {
        return Err(Error::Domain("NOON state needs N >= 1".into()));
    }
    let spin = HalfInteger::from_twice(n as i32);
    let dim = spin.multiplicity();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[dim - 1] = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, relative_phase);
    Ok(single_sector(SectorDensityMatrix::pure(spin, &amps)?))
}

fn single_sector(block: SectorDensityMatrix) -> PolarizationState {
    let mut sectors = BTreeMap::new();
    sectors.insert(block.spin(), block);
    PolarizationState::from_map(sectors)
}

/// A truncated infinite-sector state and its bookkeeping.
#[derive(Clone, Debug)]
pub struct TruncatedState {
    /// The retained sectors, renormalized to unit trace.
    pub state: PolarizationState,
    /// Sector weights before renormalization.
    pub raw_weights: Vec<(HalfInteger, f64)>,
    /// Sum of the raw retained weights.
    pub retained_weight: f64,
    /// Upper bound on the discarded tail weight.
    pub discarded_bound: f64,
    /// Factor `1 / retained_weight` applied to every retained block.
    pub renormalization: f64,
}

/// Polarization sector of the product coherent state `|α_H⟩ ⊗ |α_V⟩`.
///
/// Sector `N = 2S` carries the Poisson weight `e^{−|α|²}|α|^{2N}/N!` times
/// the coherent projector at `θ = 2 atan2(|α_H|, |α_V|)`,
/// `φ = arg α_V − arg α_H`. Sectors are added in increasing `N` until a
/// rigorous bound on the remaining tail drops below `trunc_eps`.
pub fn two_mode_coherent(alpha_h: Complex64, alpha_v: Complex64, trunc_eps: f64) -> Result<TruncatedState> {
    if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
        return Err(Error::Domain(format!("truncation epsilon must lie in (0, 1), got {trunc_eps}")));
    }
    let intensity = alpha_h.norm_sqr() + alpha_v.norm_sqr();
    if !intensity.is_finite() {
        return Err(Error::Domain("non-finite coherent amplitude".into()));
    }
    let theta = 2.0 * alpha_h.norm().atan2(alpha_v.norm());
    let phi = if alpha_h.norm() == 0.0 || alpha_v.norm() == 0.0 {
        0.0
    } else {
        (alpha_v.arg() - alpha_h.arg()).rem_euclid(2.0 * PI)
    };

    let ln_intensity = intensity.ln();
    let poisson = |n: u64| -> f64 {
        if intensity == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (-intensity + n as f64 * ln_intensity - crate::angular::ln_factorial(n)).exp()
    };

    let mut raw_weights = Vec::new();
    let mut retained = 0.0;
    let mut n: u64 = 0;
    let discarded_bound = loop {
        let w = poisson(n);
        raw_weights.push((HalfInteger::from_twice(n as i32), w));
        retained += w;
        // Tail Σ_{k>n} p_k ≤ p_{n+1} / (1 − λ/(n+2)) once n + 2 > λ.
        let next = n + 1;
        let ratio = intensity / (next + 1) as f64;
        if ratio < 1.0 {
            let bound = poisson(next) / (1.0 - ratio);
            if bound < trunc_eps {
                break bound;
            }
        }
        n = next;
    };

    let renormalization = 1.0 / retained;
    let mut sectors = BTreeMap::new();
    for &(spin, w) in &raw_weights {
        if w == 0.0 {
            continue;
        }
        let amps = coherent_amplitudes(spin, theta, phi)?;
        let block = SectorDensityMatrix::pure(spin, amps.amplitudes())?.scaled(w * renormalization);
        sectors.insert(spin, block);
    }
    Ok(TruncatedState {
        state: PolarizationState::from_map(sectors),
        raw_weights,
        retained_weight: retained,
        discarded_bound,
        renormalization,
    })
}

/// Convex combination of states, summed sector by sector.
pub fn mix(states: &[PolarizationState], weights: &[f64]) -> Result<PolarizationState> {
    if states.len() != weights.len() || states.is_empty() {
        return Err(Error::Domain(format!(
            "mixture needs one weight per state, got {} states and {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0 || !w.is_finite()) {
        return Err(Error::Domain("mixture weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::Domain(format!("mixture weights sum to {total}, not 1")));
    }
    let mut acc: BTreeMap<HalfInteger, CMatrix> = BTreeMap::new();
    for (state, &w) in states.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for block in state.sectors() {
            let dim = block.dim();
            let entry = acc.entry(block.spin()).or_insert_with(|| CMatrix::zeros(dim, dim));
            *entry += block.matrix().map(|z| z * w);
        }
    }
    let sectors = acc
        .into_iter()
        .map(|(spin, m)| (spin, SectorDensityMatrix::from_parts_unchecked(spin, m)))
        .collect();
    Ok(PolarizationState::from_map(sectors))
}

/// Mean Stokes vector `(⟨S₁⟩, ⟨S₂⟩, ⟨S₃⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StokesVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }
}

/// Stokes operators `(S₁, S₂, S₃)` on the spin-`S` multiplet.
pub fn stokes_operators(spin: HalfInteger) -> [CMatrix; 3] {
    let dim = spin.multiplicity();
    let s = spin.to_f64();
    // S₊ = a_H† a_V raises m by one, i.e. moves one row up.
    let mut raise = CMatrix::zeros(dim, dim);
    for col in 1..dim {
        let m = spin.projection_at(col).to_f64();
        raise[(col - 1, col)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let s1 = (&raise + &lower).map(|z| z * 0.5);
    let s2 = (&raise - &lower).map(|z| z * Complex64::new(0.0, -0.5));
    let s3 = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(spin.projection_at(r).to_f64(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    [s1, s2, s3]
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn stokes_mean(state: &PolarizationState) -> StokesVector {
    let mut mean = [0.0; 3];
    for block in state.sectors() {
        let ops = stokes_operators(block.spin());
        for (k, op) in ops.iter().enumerate() {
            mean[k] += trace_product(block.matrix(), op).re;
        }
    }
    StokesVector { s1: mean[0], s2: mean[1], s3: mean[2] }
}

/// Total Stokes variance and the bound it must respect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesUncertainty {
    /// `Δ²S₁ + Δ²S₂ + Δ²S₃`.
    pub variance_sum: f64,
    /// `⟨N⟩ / 2`, the lower bound on `variance_sum`.
    pub half_mean_photon_number: f64,
}

impl StokesUncertainty {
    /// `variance_sum − ⟨N⟩/2`, zero exactly for SU(2) coherent states.
    pub fn excess(&self) -> f64 {
        self.variance_sum - self.half_mean_photon_number
    }
}

pub fn stokes_uncertainty(state: &PolarizationState) -> StokesUncertainty {
    let mean = stokes_mean(state);
    // Σ_k ⟨S_k²⟩ = ⟨S(S+1)⟩ on every sector.
    let second: f64 = state
        .sectors()
        .map(|b| {
            let s = b.spin().to_f64();
            b.trace() * s * (s + 1.0)
        })
        .sum();
    let m = mean.as_array();
    StokesUncertainty {
        variance_sum: second - (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]),
        half_mean_photon_number: state.half_mean_photon_number(),
    }
}

/// The sphere displacement `D(θ, φ) = exp(ξS₊ − ξ*S₋)`, `ξ = (θ/2)e^{−iφ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub theta: f64,
    pub phi: f64,
}

impl Displacement {
    pub fn new(theta: f64, phi: f64) -> Self {
        Displacement { theta, phi }
    }

    /// `e^{−iφS₃} exp(iθS_y) e^{iφS₃}` on the spin-`S` multiplet.
    pub fn sector_matrix(&self, spin: HalfInteger) -> CMatrix {
        let d = wigner_small_d_matrix(spin, self.theta);
        let dim = spin.multiplicity();
        CMatrix::from_fn(dim, dim, |r, c| {
            let mr = spin.projection_at(r).to_f64();
            let mc = spin.projection_at(c).to_f64();
            Complex64::from_polar(d[(r, c)], self.phi * (mc - mr))
        })
    }

    /// The SO(3) image `R_z(φ) R_y(−θ) R_z(−φ)` acting on Stokes vectors.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let rz = |s: f64, c: f64| [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let ry = [[ct, 0.0, -st], [0.0, 1.0, 0.0], [st, 0.0, ct]];
        matmul3(&matmul3(&rz(sp, cp), &ry), &rz(-sp, cp))
    }
}

pub(crate) fn matmul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Random states for property checks.
pub mod random {
    use super::*;

    /// Ginibre-style random block `G G†` of the given rank, unit trace.
    pub fn random_block<R: Rng + ?Sized>(rng: &mut R, spin: HalfInteger, rank: usize) -> CMatrix {
        let dim = spin.multiplicity();
        let rank = rank.clamp(1, dim);
        let g = CMatrix::from_fn(dim, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let rho = &g * g.adjoint();
        let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
        rho.map(|z| z / tr)
    }

    /// A random pure single-sector state.
    pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, spin: HalfInteger) -> PolarizationState {
        let block = random_block(rng, spin, 1);
        single_sector(SectorDensityMatrix::from_parts_unchecked(spin, block))
    }

    /// A random mixed state over 1–`max_sectors` distinct sectors with
    /// `2S ≤ max_two_s` and random weights and ranks.
    pub fn random_mixed_state<R: Rng + ?Sized>(
        rng: &mut R,
        max_two_s: i32,
        max_sectors: usize,
    ) -> PolarizationState {
        let available = (max_two_s + 1) as usize;
        let count = rng.random_range(1..=max_sectors.min(available).max(1));
        let mut spins: Vec<i32> = (0..=max_two_s).collect();
        // partial Fisher–Yates
        for i in 0..count {
            let j = rng.random_range(i..spins.len());
            spins.swap(i, j);
        }
        let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut sectors = BTreeMap::new();
        for (i, &two_s) in spins[..count].iter().enumerate() {
            let spin = HalfInteger::from_twice(two_s);
            let rank = rng.random_range(1..=spin.multiplicity());
            let block = random_block(rng, spin, rank).map(|z| z * (raw[i] / total));
            sectors.insert(spin, SectorDensityMatrix::from_parts_unchecked(spin, block));
        }
        PolarizationState::from_map(sectors)
    }

    /// A uniformly random displacement on the sphere.
    pub fn random_displacement<R: Rng + ?Sized>(rng: &mut R) -> Displacement {
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        Displacement::new(cos_t.acos(), rng.random_range(0.0..2.0 * PI))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_block_is_valid() {
        let block = SectorDensityMatrix::new(h(0), CMatrix::from_element(1, 1, c(1.0))).unwrap();
        let state = make_state(vec![block]).unwrap();
        assert_eq!(state.total_trace(), 1.0);
        assert_eq!(state, fock_state(0, 0));
    }

    #[test]
    fn half_trace_is_rejected() {
        let block = SectorDensityMatrix::new(h(0), CMatrix::from_element(1, 1, c(0.5))).unwrap();
        let err = make_state(vec![block]).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "trace sum", .. }), "{err}");
    }

    #[test]
    fn two_sector_state() {
        let a = SectorDensityMatrix::new(h(1), CMatrix::identity(2, 2).map(|z| z * 0.15)).unwrap();
        let b = SectorDensityMatrix::new(h(2), CMatrix::identity(3, 3).map(|z| z * (0.7 / 3.0))).unwrap();
        let state = make_state(vec![a, b]).unwrap();
        assert!((state.weight(h(1)) - 0.3).abs() < 1e-15);
        assert!((state.weight(h(2)) - 0.7).abs() < 1e-15);
        assert_eq!(state.max_spin(), h(2));
    }

    #[test]
    fn duplicate_sectors_rejected() {
        let a = SectorDensityMatrix::new(h(1), CMatrix::identity(2, 2).map(|z| z * 0.25)).unwrap();
        let err = make_state(vec![a.clone(), a]).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "distinct sectors", .. }));
    }

    #[test]
    fn block_validation_errors() {
        let mut m = CMatrix::identity(2, 2).map(|z| z * 0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let err = SectorDensityMatrix::new(h(1), m).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "hermitian", .. }));

        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.2), c(-0.2)]));
        let err = SectorDensityMatrix::new(h(1), m).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "positive semidefinite", .. }));

        let err = SectorDensityMatrix::new(h(2), CMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "shape", .. }));
    }

    #[test]
    fn fock_relabeling() {
        let s = fock_state(1, 1);
        let b = s.sector(h(2)).unwrap();
        assert_eq!(b.entry(h(0), h(0)), Some(c(1.0)));
        assert_eq!(b.trace(), 1.0);

        let s = fock_state(3, 1);
        let b = s.sector(h(4)).unwrap();
        assert_eq!(b.entry(h(2), h(2)), Some(c(1.0)));

        for (nh, nv) in [(0, 0), (2, 0), (0, 3), (4, 1), (2, 5)] {
            let mean = stokes_mean(&fock_state(nh, nv));
            assert_eq!(mean.s3, (nh as f64 - nv as f64) / 2.0);
            assert_eq!((mean.s1, mean.s2), (0.0, 0.0));
        }
    }

    #[test]
    fn coherent_state_poles() {
        for two_s in 1..6 {
            let s = h(two_s);
            let south = su2_coherent_state(s, 0.0, 0.0).unwrap();
            let b = south.sector(s).unwrap();
            assert!((b.entry(-s, -s).unwrap().re - 1.0).abs() < 1e-15);
            let north = su2_coherent_state(s, PI, 0.0).unwrap();
            assert!((north.sector(s).unwrap().entry(s, s).unwrap().re - 1.0).abs() < 1e-14);
            let mean = stokes_mean(&south);
            assert!((mean.s3 + s.to_f64()).abs() < 1e-14);
        }
        let equator = su2_coherent_state(h(2), PI / 2.0, 0.0).unwrap();
        let p = equator.sector(h(2)).unwrap().entry(h(0), h(0)).unwrap().re;
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stokes_examples() {
        let m = stokes_mean(&fock_state(1, 1));
        assert_eq!(m.as_array(), [0.0, 0.0, 0.0]);
        let m = stokes_mean(&fock_state(2, 0));
        assert_eq!(m.as_array(), [0.0, 0.0, 1.0]);

        let u = stokes_uncertainty(&fock_state(1, 1));
        assert!((u.variance_sum - 2.0).abs() < 1e-15);
        assert_eq!(u.half_mean_photon_number, 1.0);

        let u = stokes_uncertainty(&fock_state(0, 0));
        assert_eq!((u.variance_sum, u.half_mean_photon_number), (0.0, 0.0));

        let s = h(5);
        let u = stokes_uncertainty(&su2_coherent_state(s, 0.0, 0.0).unwrap());
        assert!((u.variance_sum - 2.5).abs() < 1e-13);
        assert!(u.excess().abs() < 1e-12);
    }

    #[test]
    fn stokes_operators_obey_su2_algebra() {
        for two_s in 1..7 {
            let [s1, s2, s3] = stokes_operators(h(two_s));
            let comm = &s1 * &s2 - &s2 * &s1;
            let target = s3.map(|z| z * Complex64::new(0.0, 1.0));
            assert!((comm - target).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
            let casimir = &s1 * &s1 + &s2 * &s2 + &s3 * &s3;
            let s = 0.5 * two_s as f64;
            for i in 0..casimir.nrows() {
                assert!((casimir[(i, i)].re - s * (s + 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noon_states() {
        let s = noon_state(1, 0.0).unwrap();
        let b = s.sector(h(1)).unwrap();
        assert!((b.entry(h(1), h(1)).unwrap().re - 0.5).abs() < 1e-15);
        assert!((b.entry(h(-1), h(-1)).unwrap().re - 0.5).abs() < 1e-15);

        let s = noon_state(2, 0.0).unwrap();
        let b = s.sector(h(2)).unwrap();
        assert!((b.entry(h(2), h(-2)).unwrap().re - 0.5).abs() < 1e-15);
        assert_eq!(b.entry(h(0), h(0)).unwrap(), c(0.0));

        assert!(matches!(noon_state(0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mixtures() {
        let rho = fock_state(2, 1);
        assert_eq!(mix(std::slice::from_ref(&rho), &[1.0]).unwrap(), rho);

        let s = h(2);
        let up = su2_coherent_state(s, PI, 0.0).unwrap();
        let down = su2_coherent_state(s, 0.0, 0.0).unwrap();
        let mixed = mix(&[up, down], &[0.5, 0.5]).unwrap();
        let b = mixed.sector(s).unwrap();
        for r in 0..3 {
            for col in 0..3 {
                if r != col {
                    assert!(b.matrix()[(r, col)].norm() < 1e-15);
                }
            }
        }

        let a = fock_state(1, 0);
        let bb = fock_state(1, 1);
        let m = mix(&[a, bb], &[0.4, 0.6]).unwrap();
        assert!((m.weight(h(1)) - 0.4).abs() < 1e-15);
        assert!((m.weight(h(2)) - 0.6).abs() < 1e-15);

        assert!(matches!(mix(&[fock_state(0, 0)], &[0.9]), Err(Error::Domain(_))));
        assert!(matches!(
            mix(&[fock_state(0, 0), fock_state(1, 0)], &[1.5, -0.5]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn two_mode_coherent_vacuum_and_poisson() {
        let t = two_mode_coherent(c(0.0), c(0.0), 1e-6).unwrap();
        assert_eq!(t.state, fock_state(0, 0));

        let t = two_mode_coherent(c(1.0), c(1.0), 1e-10).unwrap();
        let w2 = t.raw_weights.iter().find(|(s, _)| *s == h(2)).unwrap().1;
        assert!((w2 - (-2.0f64).exp() * 2.0).abs() < 1e-15);
        assert!((w2 - 0.2706705664732254).abs() < 1e-15);
        assert!(t.discarded_bound < 1e-10);
        assert!((t.state.total_trace() - 1.0).abs() < 1e-14);
        assert!((t.retained_weight * t.renormalization - 1.0).abs() < 1e-15);

        assert!(matches!(two_mode_coherent(c(1.0), c(0.0), 0.0), Err(Error::Domain(_))));
        assert!(matches!(two_mode_coherent(c(1.0), c(0.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_mode_light_is_fully_polarized() {
        let t = two_mode_coherent(Complex64::new(0.8, 0.3), c(0.0), 1e-12).unwrap();
        for block in t.state.sectors() {
            let s = block.spin();
            let top = block.entry(s, s).unwrap().re;
            assert!((top - block.trace()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_mode_sectors_match_fock_expansion() {
        // Oracle: expand |α_H⟩|α_V⟩ in Fock amplitudes directly.
        let ah = Complex64::new(0.6, -0.4);
        let av = Complex64::new(-0.3, 0.9);
        let t = two_mode_coherent(ah, av, 1e-12).unwrap();
        let norm = (-(ah.norm_sqr() + av.norm_sqr()) / 2.0).exp();
        for block in t.state.sectors() {
            let s = block.spin();
            let n = s.twice() as u32;
            let amps: Vec<Complex64> = (0..=n)
                .map(|i| {
                    let nh = n - i;
                    let nv = i;
                    let fact = |k: u32| (1..=k).map(|x| x as f64).product::<f64>();
                    ah.powu(nh) * av.powu(nv) * (norm / (fact(nh) * fact(nv)).sqrt())
                })
                .collect();
            let oracle = CMatrix::from_fn(amps.len(), amps.len(), |r, col| amps[r] * amps[col].conj())
                .map(|z| z * t.renormalization);
            let diff = (block.matrix() - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-14, "sector {s}: {diff:e}");
        }
    }
}
