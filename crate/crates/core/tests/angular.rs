mod common;

use common::h;
use nalgebra::DMatrix;
use num_complex::Complex64;
use polsphere::angular::{cg, cg_stretched, wigner_small_d_matrix, HalfInteger, HarmonicTable};
use polsphere::measures::build_grid;

/// Rows `(m1, m2)` and columns `(J, M)` of the coupling matrix for `j1 ⊗ j2`.
fn coupling_matrix(j1: HalfInteger, j2: HalfInteger) -> DMatrix<f64> {
    let rows: Vec<(HalfInteger, HalfInteger)> =
        j1.projections().flat_map(|m1| j2.projections().map(move |m2| (m1, m2))).collect();
    let lo = (j1 - j2).abs().twice();
    let hi = (j1 + j2).twice();
    let cols: Vec<(HalfInteger, HalfInteger)> = (lo..=hi)
        .step_by(2)
        .flat_map(|t| {
            let j = h(t);
            j.projections().map(move |m| (j, m))
        })
        .collect();
    assert_eq!(rows.len(), cols.len());
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        let (m1, m2) = rows[r];
        let (j, m) = cols[c];
        if m1 + m2 != m {
            0.0
        } else {
            cg(j1, m1, j2, m2, j, m).unwrap()
        }
    })
}

#[test]
fn clebsch_gordan_matrices_are_orthogonal() {
    for a in 0..=20 {
        for b in 0..=20 {
            let u = coupling_matrix(h(a), h(b));
            let n = u.nrows();
            let err1 = (u.transpose() * &u - DMatrix::identity(n, n)).amax();
            let err2 = (&u * u.transpose() - DMatrix::identity(n, n)).amax();
            assert!(err1 < 1e-12 && err2 < 1e-12, "2j1={a} 2j2={b}: {err1:e} {err2:e}");
        }
    }
}

#[test]
fn clebsch_gordan_exchange_symmetry() {
    for a in 0..=8i32 {
        for b in 0..=8 {
            for t in ((a - b).abs()..=a + b).step_by(2) {
                let (j1, j2, j) = (h(a), h(b), h(t));
                let sign = if ((a + b - t) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                for m1 in j1.projections() {
                    for m2 in j2.projections() {
                        let m = m1 + m2;
                        if m.abs().twice() > t {
                            continue;
                        }
                        let x = cg(j1, m1, j2, m2, j, m).unwrap();
                        let y = cg(j2, m2, j1, m1, j, m).unwrap();
                        assert!((x - sign * y).abs() < 1e-14);
                        let z = cg(j1, -m1, j2, -m2, j, -m).unwrap();
                        assert!((x - sign * z).abs() < 1e-14);
                    }
                }
            }
        }
    }
}

#[test]
fn stretched_closed_form_matches_general_coefficient() {
    for two_s in 0..=40 {
        let s = h(two_s);
        for k in 0..=two_s as u32 {
            let closed = cg_stretched(s, k).unwrap();
            let general = cg(s, s, HalfInteger::from_int(k as i32), HalfInteger::ZERO, s, s).unwrap();
            assert!((closed - general).abs() <= 1e-12 * general.abs().max(1e-300), "2S={two_s} K={k}");
        }
    }
}

#[test]
fn wigner_d_matrices_are_orthogonal() {
    for two_s in 0..=40 {
        for theta in [0.1, 1.0, 2.0, 3.0] {
            let d = wigner_small_d_matrix(h(two_s), theta);
            let n = d.nrows();
            let err = (d.transpose() * &d - DMatrix::identity(n, n)).amax();
            assert!(err < 1e-12, "2S={two_s} θ={theta}: {err:e}");
        }
    }
}

#[test]
fn wigner_d_composes_along_one_axis() {
    for two_s in [1, 4, 9, 20] {
        let (a, b) = (0.7, 1.9);
        let prod = wigner_small_d_matrix(h(two_s), a) * wigner_small_d_matrix(h(two_s), b);
        let direct = wigner_small_d_matrix(h(two_s), a + b);
        assert!((prod - direct).amax() < 1e-12);
    }
}

#[test]
fn harmonics_are_orthonormal_on_the_standard_grid() {
    let k_max = 20u32;
    let grid = build_grid(h(20));
    let n_funcs = ((k_max + 1) * (k_max + 1)) as usize;
    let mut y = DMatrix::<Complex64>::zeros(grid.len(), n_funcs);
    for (i, node) in grid.nodes().enumerate() {
        let table = HarmonicTable::new(k_max, node.theta, node.phi);
        let w = node.weight.sqrt();
        for k in 0..=k_max {
            for (j, v) in table.degree(k).iter().enumerate() {
                y[(i, (k * k) as usize + j)] = v * w;
            }
        }
    }
    let gram = y.adjoint() * &y;
    let err = (gram - DMatrix::identity(n_funcs, n_funcs)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err:e}");
}
