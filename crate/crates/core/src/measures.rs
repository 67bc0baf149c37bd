//! Effective areas `A = ∫ Q² dΩ` and `A_K = ∫ Q_K² dΩ`, their algebraic
//! closed forms, and the hidden-polarization verdict.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::angular::{cg_stretched, HalfInteger};
use crate::error::{Error, Result};
use crate::multipole::MultipoleTable;
use crate::qfunction::{evaluate_field, ComponentCoefficients, QField};
use crate::sphere::{GridTooCoarse, SphereGrid};
use crate::state::PolarizationState;

pub const DEFAULT_DIPOLE_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_HIGHER_THRESHOLD: f64 = 1e-6;

/// Grid exact for `Q²` of any state with spins up to `s_max`:
/// `2·2S + 1` Legendre nodes by `4·2S + 1` azimuthal nodes.
pub fn build_grid(s_max: HalfInteger) -> SphereGrid {
    let two_s = s_max.twice().max(0) as usize;
    SphereGrid::new(2 * two_s + 1, 4 * two_s + 1).expect("grid sizes are positive")
}

/// A quadrature value with an optional resolution warning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub warning: Option<GridTooCoarse>,
}

fn area_warning(state: &PolarizationState, grid: &SphereGrid) -> Option<GridTooCoarse> {
    grid.check_degree(2 * state.max_spin().twice() as u32)
}

fn integrate_square(grid: &SphereGrid, values: &[f64]) -> f64 {
    grid.nodes().zip(values).map(|(n, v)| n.weight * v * v).sum()
}

/// `∫ Q² dΩ` by quadrature.
pub fn effective_area(state: &PolarizationState, grid: &SphereGrid) -> Result<Integral> {
    let field = evaluate_field(state, grid, Some(0))?;
    Ok(Integral { value: integrate_square(grid, &field.total), warning: area_warning(state, grid) })
}

/// `∫ Q_K² dΩ` by quadrature.
pub fn effective_area_k(state: &PolarizationState, grid: &SphereGrid, k: u32) -> Result<Integral> {
    let field = evaluate_field(state, grid, Some(k))?;
    Ok(Integral {
        value: integrate_square(grid, &field.components[k as usize]),
        warning: area_warning(state, grid),
    })
}

/// Total and per-rank areas from one field evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaReport {
    pub total_area: f64,
    pub per_k: BTreeMap<u32, f64>,
    pub k_max: u32,
    /// `total_area − Σ_K per_k`.
    pub truncation_residual: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub exact_degree: u32,
    pub warning: Option<GridTooCoarse>,
}

impl AreaReport {
    pub fn from_field(state: &PolarizationState, field: &QField) -> Self {
        let grid = &field.grid;
        let total_area = integrate_square(grid, &field.total);
        let per_k: BTreeMap<u32, f64> = field
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| (k as u32, integrate_square(grid, c)))
            .collect();
        let truncation_residual = total_area - per_k.values().sum::<f64>();
        AreaReport {
            total_area,
            per_k,
            k_max: field.k_max,
            truncation_residual,
            n_theta: grid.n_theta(),
            n_phi: grid.n_phi(),
            exact_degree: grid.exact_degree(),
            warning: area_warning(state, grid),
        }
    }
}

/// Areas for `K ≤ k_max` (default `2S_max`).
pub fn area_report(state: &PolarizationState, grid: &SphereGrid, k_max: Option<u32>) -> Result<AreaReport> {
    let field = evaluate_field(state, grid, k_max)?;
    Ok(AreaReport::from_field(state, &field))
}

/// `A_K = Σ_q |a_Kq|²` with `a_Kq = Σ_S sqrt((2S+1)/4π) C^{SS}_{SS,K0} ρ_Kq^(S)`,
/// cross-sector products included.
pub fn effective_area_k_closed(table: &MultipoleTable, k: u32) -> Result<f64> {
    let coeffs = ComponentCoefficients::from_table(table, k)?;
    Ok(coeffs.rank(k).iter().map(|a| a.norm_sqr()).sum())
}

/// Sector-diagonal sum `Σ_S (2S+1)/(4π) C² Σ_q |ρ_Kq^(S)|²`. Exact only when a
/// single sector carries rank `K`.
pub fn effective_area_k_diagonal(table: &MultipoleTable, k: u32) -> Result<f64> {
    let missing = table.missing(Some(k));
    if missing.iter().any(|&(_, kk)| kk == k) {
        return Err(Error::IncompleteTable { missing });
    }
    let mut total = 0.0;
    for sector in table.sectors() {
        let Some(rank) = sector.rank(k) else { continue };
        let spin = sector.spin();
        let c = cg_stretched(spin, k)?;
        let norm: f64 = rank.iter().map(|z| z.norm_sqr()).sum();
        total += spin.multiplicity() as f64 / (4.0 * PI) * c * c * norm;
    }
    Ok(total)
}

/// `A_K = (2K+1)/(4π) (C^{SS}_{SS,K0})⁴` for every SU(2) coherent state of spin `S`.
pub fn coherent_area_k(spin: HalfInteger, k: u32) -> Result<f64> {
    if spin.twice() < 0 || k as i64 > spin.twice() as i64 {
        return Err(Error::Domain(format!("need 0 <= K <= 2S, got K = {k}, S = {spin}")));
    }
    let c = cg_stretched(spin, k)?;
    Ok((2 * k + 1) as f64 / (4.0 * PI) * c.powi(4))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HiddenPolarizationReport {
    pub dipole_area: f64,
    /// `Σ_{K≥2} A_K`.
    pub higher_area: f64,
    pub eps_dipole: f64,
    pub eps_higher: f64,
    pub verdict: bool,
}

impl HiddenPolarizationReport {
    pub fn classify(dipole_area: f64, higher_area: f64, eps_dipole: f64, eps_higher: f64) -> Self {
        HiddenPolarizationReport {
            dipole_area,
            higher_area,
            eps_dipole,
            eps_higher,
            verdict: dipole_area < eps_dipole && higher_area > eps_higher,
        }
    }
}

/// No dipole but some higher-order structure.
pub fn hidden_polarization(
    state: &PolarizationState,
    grid: &SphereGrid,
    eps_dipole: f64,
    eps_higher: f64,
) -> Result<HiddenPolarizationReport> {
    if !(eps_dipole > 0.0 && eps_higher > 0.0) {
        return Err(Error::Domain("hidden-polarization thresholds must be positive".into()));
    }
    let report = area_report(state, grid, None)?;
    Ok(hidden_from_report(&report, eps_dipole, eps_higher))
}

pub fn hidden_from_report(report: &AreaReport, eps_dipole: f64, eps_higher: f64) -> HiddenPolarizationReport {
    let dipole = report.per_k.get(&1).copied().unwrap_or(0.0);
    let higher = report.per_k.range(2..).map(|(_, a)| a).sum();
    HiddenPolarizationReport::classify(dipole, higher, eps_dipole, eps_higher)
}
