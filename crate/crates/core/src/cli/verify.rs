//! Cross-route and invariant self-check on a seeded random corpus.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angular::{cg_stretched, HalfInteger};
use crate::error::Result;
use crate::measures::{area_report, build_grid, coherent_area_k, effective_area_k_closed};
use crate::multipole::{extract_multipoles, reconstruct_state};
use crate::qfunction::{evaluate_field, q_sector_direct, q_sector_via_multipoles_with};
use crate::state::random::{random_displacement, random_mixed_state};
use crate::state::{
    fock_state, mix, noon_state, stokes_uncertainty, su2_coherent_state, two_mode_coherent, PolarizationState,
};

pub const CORPUS_SIZE: usize = 20;
pub const CORPUS_MAX_TWO_S: i32 = 10;
pub const NODES_PER_STATE: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }

    /// The pass/fail matrix.
    pub fn render(&self) -> String {
        let mut out = format!("seed {}\n{:<20} {:<6} {:>12} {:>10}\n", self.seed, "check", "result", "max_error", "tolerance");
        for c in &self.checks {
            let verdict = if c.passed() { "pass" } else { "FAIL" };
            writeln!(out, "{:<20} {:<6} {:>12.3e} {:>10.0e}", c.name, verdict, c.max_error, c.tolerance).unwrap();
        }
        out
    }
}

/// Optional perturbation of the stretched coefficients, used to show that
/// the suite notices a corrupted kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Fault {
    pub relative_scale: f64,
}

impl Fault {
    pub const SENSITIVITY: Fault = Fault { relative_scale: 1e-6 };
}

pub fn corpus(seed: u64) -> Vec<PolarizationState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..CORPUS_SIZE).map(|_| random_mixed_state(&mut rng, CORPUS_MAX_TWO_S, 3)).collect()
}

fn builtin_states() -> Result<Vec<PolarizationState>> {
    let h = HalfInteger::from_twice;
    Ok(vec![
        fock_state(0, 0),
        fock_state(1, 1),
        fock_state(3, 2),
        su2_coherent_state(h(5), 0.8, 2.3)?,
        noon_state(4, 0.6)?,
        two_mode_coherent(Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.8), 1e-12)?.state,
        mix(&[fock_state(2, 0), su2_coherent_state(h(3), 1.9, 0.4)?], &[0.3, 0.7])?,
    ])
}

fn max(acc: &mut f64, err: f64) {
    // NaN counts as a failure.
    if err.is_nan() {
        *acc = f64::INFINITY;
    } else if err > *acc {
        *acc = err;
    }
}

pub fn run(seed: u64, fault: Option<Fault>) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let states = corpus(seed);
    let mut checks = Vec::new();

    let scale = 1.0 + fault.map_or(0.0, |f| f.relative_scale);
    // The fault touches the monopole coefficient only.
    let provider = move |s: HalfInteger, k: u32| cg_stretched(s, k).map(|c| if k == 0 { c * scale } else { c });
    let mut err = 0.0;
    for state in &states {
        let table = extract_multipoles(state, None)?;
        for _ in 0..NODES_PER_STATE {
            let theta = rng.random_range(-1.0f64..1.0).acos();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            for spin in state.spins() {
                let direct = q_sector_direct(state, spin, theta, phi)?;
                let via = q_sector_via_multipoles_with(&table, spin, theta, phi, &provider)?;
                max(&mut err, (direct - via).abs());
            }
        }
    }
    checks.push(CheckResult { name: "route_equivalence", max_error: err, tolerance: 1e-10 });

    let mut all = builtin_states()?;
    all.extend(states.iter().cloned());

    let (mut norm, mut resum, mut positive, mut parseval, mut closed) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for state in &all {
        let grid = build_grid(state.max_spin());
        let field = evaluate_field(state, &grid, None)?;
        max(&mut norm, (grid.integrate(&field.total) - 1.0).abs());
        max(&mut resum, field.resummation_residual());
        max(&mut positive, -field.total.iter().copied().fold(0.0, f64::min));
        let report = crate::measures::AreaReport::from_field(state, &field);
        max(&mut parseval, report.truncation_residual.abs());
        let table = extract_multipoles(state, None)?;
        for (&k, &a) in &report.per_k {
            max(&mut closed, (a - effective_area_k_closed(&table, k)?).abs());
        }
    }
    checks.push(CheckResult { name: "normalization", max_error: norm, tolerance: 1e-10 });
    checks.push(CheckResult { name: "resummation", max_error: resum, tolerance: 1e-12 });
    checks.push(CheckResult { name: "positivity", max_error: positive, tolerance: 1e-12 });
    checks.push(CheckResult { name: "parseval", max_error: parseval, tolerance: 1e-10 });
    checks.push(CheckResult { name: "area_closed_form", max_error: closed, tolerance: 1e-10 });

    let (mut round, mut purity) = (0.0, 0.0);
    for state in &all {
        let table = extract_multipoles(state, None)?;
        let back = reconstruct_state(&table)?;
        for block in state.sectors() {
            let other = back.sector(block.spin()).map(|b| b.matrix().clone());
            match other {
                Some(m) => max(&mut round, (block.matrix() - m).iter().map(|z| z.norm()).fold(0.0, f64::max)),
                None => max(&mut round, f64::INFINITY),
            }
            let sector = table.sector(block.spin()).expect("extracted");
            max(&mut purity, (sector.norm_sqr() - block.purity()).abs());
        }
    }
    checks.push(CheckResult { name: "round_trip", max_error: round, tolerance: 1e-12 });
    checks.push(CheckResult { name: "purity_identity", max_error: purity, tolerance: 1e-12 });

    let mut law = 0.0;
    for two_s in 1..=12 {
        let spin = HalfInteger::from_twice(two_s);
        let d = random_displacement(&mut rng);
        let state = su2_coherent_state(spin, d.theta, d.phi)?;
        let report = area_report(&state, &build_grid(spin), None)?;
        for (&k, &a) in &report.per_k {
            max(&mut law, (a - coherent_area_k(spin, k)?).abs());
        }
    }
    checks.push(CheckResult { name: "coherent_law", max_error: law, tolerance: 1e-10 });

    let mut violation = 0.0;
    for state in &all {
        max(&mut violation, -stokes_uncertainty(state).excess());
    }
    for two_s in 0..=12 {
        let d = random_displacement(&mut rng);
        let c = su2_coherent_state(HalfInteger::from_twice(two_s), d.theta, d.phi)?;
        max(&mut violation, stokes_uncertainty(&c).excess().abs());
    }
    checks.push(CheckResult { name: "uncertainty", max_error: violation, tolerance: 1e-12 });

    Ok(VerifyReport { seed, checks })
}
