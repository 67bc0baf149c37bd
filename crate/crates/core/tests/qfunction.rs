mod common;

use std::f64::consts::PI;

use common::{h, random_node, rng};
use num_complex::Complex64;
use polsphere::measures::build_grid;
use polsphere::qfunction::{bloch_vector, chart_point_of, evaluate_field, q_component, q_sector_direct, q_total};
use polsphere::state::random::{random_displacement, random_mixed_state};
use polsphere::state::stokes_mean;
use polsphere::{
    extract_multipoles, fock_state, noon_state, q_sector_via_multipoles, su2_coherent_state, two_mode_coherent,
    SphereGrid,
};

/// Published constants for the two-photon `|1,0⟩` example, compared with the
/// normalized values produced here. All differ by one constant factor, and
/// only the normalized form integrates to one.
#[test]
fn worked_example_prefactor_analysis() {
    let state = fock_state(1, 1);
    let table = extract_multipoles(&state, None).unwrap();
    let published_total = |t: f64| 0.75 * (1.0 / (3.0 * PI)).sqrt() * t.sin().powi(2);
    let published_q0 = 0.5 * (1.0 / (3.0 * PI)).sqrt();
    let published_q2 = |t: f64| -0.5 * (1.0 / (3.0 * PI)).sqrt() * (1.5 * t.cos().powi(2) - 0.5);
    let factor = (4.0 * PI / 3.0).sqrt();

    for theta in [0.3, 0.9, PI / 2.0, 2.2, 2.9] {
        let phi = 0.4;
        let total = q_total(&state, theta, phi).unwrap();
        assert!((published_total(theta) / total - factor).abs() < 1e-12);
        let q0 = q_component(&table, 0, theta, phi).unwrap();
        assert!((published_q0 / q0 - factor).abs() < 1e-12);
        let q2 = q_component(&table, 2, theta, phi).unwrap();
        assert!((published_q2(theta) / q2 - factor).abs() < 1e-12);
        // The published components resum to the published total.
        assert!((published_q0 + published_q2(theta) - published_total(theta)).abs() < 1e-15);
    }

    let grid = build_grid(h(2));
    let field = evaluate_field(&state, &grid, None).unwrap();
    assert!((grid.integrate(&field.total) - 1.0).abs() < 1e-13);
    let published: Vec<f64> = grid.nodes().map(|n| published_total(n.theta)).collect();
    assert!((grid.integrate(&published) - factor).abs() < 1e-13);
}

#[test]
fn direct_and_multipole_routes_agree() {
    let mut r = rng(11);
    for _ in 0..20 {
        let state = random_mixed_state(&mut r, 10, 3);
        let table = extract_multipoles(&state, None).unwrap();
        for _ in 0..50 {
            let (theta, phi) = random_node(&mut r);
            for spin in state.spins() {
                let a = q_sector_direct(&state, spin, theta, phi).unwrap();
                let b = q_sector_via_multipoles(&table, spin, theta, phi).unwrap();
                assert!((a - b).abs() < 1e-10, "S={spin}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn field_examples() {
    let f = fock_state(1, 1);
    let field = evaluate_field(&f, &SphereGrid::new(16, 16).unwrap(), None).unwrap();
    assert!(field.resummation_residual() <= 1e-12);
    assert!(field.component(1).unwrap().iter().all(|v| v.abs() < 1e-15));

    let vac = fock_state(0, 0);
    let field = evaluate_field(&vac, &SphereGrid::new(7, 5).unwrap(), None).unwrap();
    assert!(field.total.iter().all(|v| (v - 1.0 / (4.0 * PI)).abs() < 1e-16));

    let t = two_mode_coherent(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 1e-10).unwrap();
    let grid = build_grid(t.state.max_spin());
    let field = evaluate_field(&t.state, &grid, Some(6)).unwrap();
    assert!((grid.integrate(&field.total) - 1.0).abs() < 1e-9);
    assert!(field.warning.is_none());
}

#[test]
fn coarse_grid_is_flagged() {
    let state = noon_state(4, 0.0).unwrap();
    let field = evaluate_field(&state, &SphereGrid::new(3, 3).unwrap(), None).unwrap();
    let w = field.warning.unwrap();
    assert_eq!((w.exact_degree, w.required_degree), (2, 8));
}

#[test]
fn rotating_the_state_rotates_the_field() {
    let mut r = rng(5);
    for _ in 0..10 {
        let state = random_mixed_state(&mut r, 8, 3);
        let d = random_displacement(&mut r);
        let rotated = state.displaced(d);
        let rot = d.rotation_matrix();
        for _ in 0..20 {
            let (theta, phi) = random_node(&mut r);
            let b = bloch_vector(theta, phi);
            // R⁻¹ = Rᵀ
            let back = [0, 1, 2].map(|j| (0..3).map(|i| rot[i][j] * b[i]).sum::<f64>());
            let (t0, p0) = chart_point_of(back);
            let lhs = q_total(&rotated, theta, phi).unwrap();
            let rhs = q_total(&state, t0, p0).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
        let m0 = stokes_mean(&state).as_array();
        let m1 = stokes_mean(&rotated).as_array();
        for i in 0..3 {
            let expected: f64 = (0..3).map(|j| rot[i][j] * m0[j]).sum();
            assert!((m1[i] - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn coherent_state_peaks_on_its_chart_point() {
    let mut r = rng(8);
    for two_s in 1..=10 {
        let (theta, phi) = random_node(&mut r);
        let state = su2_coherent_state(h(two_s), theta, phi).unwrap();
        let peak = q_sector_direct(&state, h(two_s), theta, phi).unwrap();
        assert!((peak - 1.0).abs() < 1e-13);
        // Mean Stokes vector points along the Bloch direction.
        let m = stokes_mean(&state).as_array();
        let b = bloch_vector(theta, phi);
        let s = two_s as f64 / 2.0;
        for i in 0..3 {
            assert!((m[i] - s * b[i]).abs() < 1e-12);
        }
    }
}
