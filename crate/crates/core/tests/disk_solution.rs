use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector2};
use polarization_core::assembly::{assemble, GalerkinSystem};
use polarization_core::curve::{discretize, normalize, ShapeSpec};
use polarization_core::error::SolveError;
use polarization_core::solve::{column_residuals, solve_system};

fn disk_system(r: f64, n_points: usize, pairs: usize, k: f64) -> GalerkinSystem {
    let raw = discretize(&ShapeSpec::disk([0.0, 0.0], r), n_points).unwrap();
    let (c, f) = normalize(&raw, 0.5);
    assemble(&c, f, pairs, pairs, k).unwrap()
}

/// Interior transmission solution on a disk: trace and flux of the source
/// `P_j` are `-1/(k+1)` times `P_j` and `Q_j`.
fn analytic_coefficients(sys: &GalerkinSystem) -> DMatrix<f64> {
    let a = -1.0 / (sys.contrast + 1.0);
    let mut x = DMatrix::zeros(sys.n_p + sys.n_q, sys.n_q);
    for j in 0..sys.n_q {
        x[(j, j)] = a;
        x[(sys.n_p + j, j)] = a;
    }
    x
}

#[test]
fn analytic_disk_solution_satisfies_the_weak_system() {
    for k in [1.0 / 3.0, 3.0, 10.0] {
        let worst = |n| {
            let sys = disk_system(0.5, n, 4, k);
            column_residuals(&sys, &analytic_coefficients(&sys))
                .into_iter()
                .fold(0.0, f64::max)
        };
        let (r128, r256, r512) = (worst(128), worst(256), worst(512));
        assert!(r512 < 1e-3, "k={k}: {r512}");
        assert!(r256 < r128 && r512 < r256, "k={k}: {r128} {r256} {r512}");
    }
}

#[test]
fn opposite_kernel_sign_breaks_consistency() {
    // flipping Γ flips P, Q and N; the analytic solution then leaves an O(1) residual
    let sys = disk_system(0.5, 256, 3, 3.0);
    let mut flipped = sys.clone();
    let (np, nq) = (sys.n_p, sys.n_q);
    flipped.matrix *= -1.0;
    flipped
        .rhs
        .view_mut((np, 0), (nq, nq))
        .copy_from(&(-sys.rhs.view((np, 0), (nq, nq))));
    let top = sys.rhs.view((0, 0), (np, nq)).into_owned() + &sys.n_block;
    flipped.rhs.view_mut((0, 0), (np, nq)).copy_from(&(top + &sys.n_block));
    let res = column_residuals(&flipped, &analytic_coefficients(&flipped));
    assert!(res.iter().all(|r| *r > 0.5), "{res:?}");
}

#[test]
fn small_disk_solution_has_single_dominant_entries() {
    let sys = disk_system(0.1, 256, 4, 3.0);
    let sol = solve_system(&sys).unwrap();
    for j in 0..sys.n_q {
        for i in 0..sys.n_p + sys.n_q {
            let v = sol.x[(i, j)];
            if i == j || i == sys.n_p + j {
                assert!((v + 0.25).abs() < 1e-4, "X[{i},{j}] = {v}");
            } else {
                assert!(v.abs() < 1e-8, "X[{i},{j}] = {v}");
            }
        }
    }
    assert!(sol.cond_estimate >= 1.0);
}

#[test]
fn unit_contrast_solution() {
    let sys = disk_system(0.3, 256, 3, 1.0);
    let sol = solve_system(&sys).unwrap();
    for j in 0..sys.n_q {
        assert!((sol.x[(j, j)] + 0.5).abs() < 1e-4);
        assert!((sol.x[(sys.n_p + j, j)] + 0.5).abs() < 1e-12);
    }
}

#[test]
fn too_few_points_is_ill_conditioned() {
    let raw = discretize(&ShapeSpec::disk([0.0, 0.0], 1.0), 16).unwrap();
    let (c, f) = normalize(&raw, 0.5);
    let sys = assemble(&c, f, 29, 29, 1.0 / 3.0).unwrap();
    match solve_system(&sys) {
        Err(SolveError::IllConditioned { cond_estimate }) => assert!(cond_estimate > 1e12),
        Ok(sol) => assert!(sol.cond_estimate > 1e12, "{}", sol.cond_estimate),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn determinant_is_positive() {
    let shapes = [
        ShapeSpec::disk([0.3, -0.2], 2.0),
        ShapeSpec::ellipse([0.0, 0.0], 1.0, 0.2, 0.7),
        ShapeSpec::Polygon {
            vertices: vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.5, 1.5]],
        },
    ];
    for shape in &shapes {
        for k in [0.1, 0.5, 2.0, 10.0] {
            let raw = discretize(shape, 96).unwrap();
            let (c, f) = normalize(&raw, 0.5);
            let sys = assemble(&c, f, 3, 3, k).unwrap();
            assert!(sys.matrix.determinant() > 0.0, "{shape:?} k={k}");
        }
    }
}

#[test]
fn b_columns_are_quarter_turns_of_a_columns() {
    let sys = disk_system(0.5, 256, 3, 2.0);
    let sol = solve_system(&sys).unwrap();
    for m in 0..3 {
        let (ca, cb) = (2 * m, 2 * m + 1);
        assert!((sol.x[(ca, ca)] - sol.x[(cb, cb)]).abs() < 1e-10);
        assert!((sol.x[(sys.n_p + ca, ca)] - sol.x[(sys.n_p + cb, cb)]).abs() < 1e-10);
    }
}

#[test]
fn solution_is_continuous_in_the_nodes() {
    let raw = discretize(&ShapeSpec::ellipse([0.0, 0.0], 1.0, 0.5, 0.2), 128).unwrap();
    let (c, f) = normalize(&raw, 0.5);
    let sys = assemble(&c, f, 3, 3, 3.0).unwrap();
    let sol = solve_system(&sys).unwrap();
    let offsets: Vec<Vector2<f64>> = (0..c.len())
        .map(|i| Vector2::new((i as f64).sin(), (i as f64 * 0.7).cos()) * 1e-9)
        .collect();
    let moved = c.with_node_offsets(&offsets);
    let sol2 = solve_system(&assemble(&moved, f, 3, 3, 3.0).unwrap()).unwrap();
    let change = (&sol2.x - &sol.x).amax();
    assert!(change <= 1e-6 * sol.cond_estimate, "{change}");
}

#[test]
fn disk_block_values_scale_with_radius() {
    // normalized circles of different radius give the same system up to degree scaling
    let sys = disk_system(0.5, 128, 2, 2.0);
    let r = 0.5 / PI;
    let exact = -PI / 2.0 * r * r;
    assert!((sys.p_block[(0, 0)] - exact).abs() < 1e-5 * exact.abs());
}
