use std::f64::consts::PI;

use polarization_core::assembly::assemble;
use polarization_core::curve::{discretize, normalize, ShapeSpec};
use polarization_core::gpt::{extract_flux, extract_trace, farfield_eval, unscale, ContractedGPT, HarmonicFieldCoefficients};
use polarization_core::oracle::{exact_disk_gpt, exact_ellipse_gpt, relative_error};
use polarization_core::solve::solve_system;
use polarization_core::{compute, ComputeRequest};

fn both(shape: &ShapeSpec, points: usize, pairs: usize, k: f64, order: usize, kappa: f64) -> (ContractedGPT, ContractedGPT) {
    let raw = discretize(shape, points).unwrap();
    let (c, f) = normalize(&raw, kappa);
    let sol = solve_system(&assemble(&c, f, pairs, pairs, k).unwrap()).unwrap();
    (
        unscale(&extract_flux(&sol, &c, k, order, f).unwrap()),
        unscale(&extract_trace(&sol, &c, k, order, f).unwrap()),
    )
}

fn rel(a: &ContractedGPT, b: &ContractedGPT) -> f64 {
    (&a.entries - &b.entries).amax() / b.entries.amax()
}

#[test]
fn disk_tensor_is_diagonal_with_contrast_factor() {
    let (r, k) = (0.4, 3.0);
    let (flux, _) = both(&ShapeSpec::disk([0.0, 0.0], r), 256, 5, k, 4, 0.5);
    for i in 0..8 {
        let m = (i / 2 + 1) as f64;
        let exact = 2.0 * PI * m * (k - 1.0) / (k + 1.0) * r.powi(2 * m as i32);
        assert!((flux.entries[(i, i)] - exact).abs() < 1e-10 * exact, "entry {i}");
        for j in 0..8 {
            if i != j {
                assert!(flux.entries[(i, j)].abs() < 1e-10 * exact);
            }
        }
    }
}

#[test]
fn two_formulas_agree_on_the_disk() {
    let (flux, trace) = both(&ShapeSpec::disk([0.0, 0.0], 0.5), 512, 2, 1.0 / 3.0, 1, 0.5);
    assert!(rel(&trace, &flux) < 1e-8, "{}", rel(&trace, &flux));
    let (flux, trace) = both(&ShapeSpec::disk([0.0, 0.0], 0.5), 512, 5, 1.0 / 3.0, 4, 0.5);
    assert!(rel(&trace, &flux) < 1e-6, "{}", rel(&trace, &flux));
}

#[test]
fn two_formulas_agree_on_a_polygon() {
    let poly = ShapeSpec::Polygon {
        vertices: vec![[0.0, 0.0], [3.0, 0.5], [2.5, 2.0], [1.0, 2.5], [-0.5, 1.0]],
    };
    let (flux, trace) = both(&poly, 1024, 4, 2.0, 3, 0.5);
    assert!(rel(&trace, &flux) < 1e-3, "{}", rel(&trace, &flux));
}

#[test]
fn unit_contrast_gives_zero_tensor() {
    let e = ShapeSpec::ellipse([1.0, 2.0], 0.7, 0.3, 0.4);
    let (flux, trace) = both(&e, 128, 4, 1.0, 3, 0.5);
    assert_eq!(flux.entries.amax(), 0.0);
    assert_eq!(trace.entries.amax(), 0.0);
}

#[test]
fn round_ellipse_matches_disk() {
    let (flux, _) = both(&ShapeSpec::ellipse([0.0, 0.0], 0.6, 0.6, 1.0), 256, 4, 0.2, 3, 0.5);
    let exact = exact_disk_gpt(0.6, 0.2, 3).unwrap();
    assert!(relative_error(&flux, &exact).unwrap().max_relative < 1e-10);
}

#[test]
fn normalization_target_does_not_change_the_result() {
    let d = ShapeSpec::disk([0.5, -1.0], 1.3);
    let (a, _) = both(&d, 256, 5, 3.0, 4, 0.5);
    let (b, _) = both(&d, 256, 5, 3.0, 4, 0.2);
    assert!(rel(&a, &b) < 1e-10, "{}", rel(&a, &b));

    // rescaling shifts Γ by a constant whose discrete moments vanish only to
    // quadrature accuracy off the circle
    let e = ShapeSpec::ellipse([0.5, -1.0], 1.0, 0.4, 0.3);
    let (a, _) = both(&e, 256, 5, 3.0, 4, 0.5);
    let (b, _) = both(&e, 256, 5, 3.0, 4, 0.25);
    assert!(rel(&a, &b) < 1e-8, "{}", rel(&a, &b));
}

#[test]
fn doubling_the_radius_scales_by_degree() {
    let (a, _) = both(&ShapeSpec::disk([0.0, 0.0], 0.3), 256, 4, 0.5, 3, 0.5);
    let (b, _) = both(&ShapeSpec::disk([0.0, 0.0], 0.6), 256, 4, 0.5, 3, 0.5);
    for i in 0..6 {
        let m = (i / 2 + 1) as i32;
        let ratio = b.entries[(i, i)] / a.entries[(i, i)];
        assert!((ratio - 4f64.powi(m)).abs() < 1e-10 * ratio);
    }
}

#[test]
fn diagonal_sign_follows_contrast() {
    for shape in [ShapeSpec::disk([0.0, 0.0], 1.0), ShapeSpec::ellipse([0.0, 0.0], 1.0, 0.3, 0.5)] {
        for (k, sign) in [(0.3, -1.0), (4.0, 1.0)] {
            let (flux, _) = both(&shape, 256, 4, k, 3, 0.5);
            for i in 0..6 {
                assert!(sign * flux.entries[(i, i)] > 0.0, "{shape:?} k={k} i={i}");
            }
        }
    }
}

#[test]
fn tilted_ellipse_matches_oracle() {
    for tilt in [0.0, 0.6, 2.0] {
        let (flux, _) = both(&ShapeSpec::ellipse([0.2, 0.1], 0.8, 0.3, tilt), 512, 6, 3.0, 4, 0.5);
        let exact = exact_ellipse_gpt(0.8, 0.3, tilt, 3.0, 4).unwrap();
        let eps = relative_error(&flux, &exact).unwrap().max_relative;
        assert!(eps < 1e-3, "tilt={tilt}: {eps}");
        assert!(flux.asymmetry() < 1e-3);
    }
}

#[test]
fn rotation_leaves_disk_tensor_unchanged() {
    let (a, _) = both(&ShapeSpec::disk([0.0, 0.0], 0.5), 256, 5, 3.0, 4, 0.5);
    let (b, _) = both(&ShapeSpec::ellipse([0.0, 0.0], 0.5, 0.5, 0.77), 256, 5, 3.0, 4, 0.5);
    assert!(rel(&a, &b) < 1e-10);
}

#[test]
fn farfield_matches_disk_perturbation() {
    let (r, k, big_r) = (0.3, 3.0, 2.0);
    let out = compute(&ComputeRequest::new(ShapeSpec::disk([0.0, 0.0], r), k, 4, 256, 5)).unwrap();
    let h = HarmonicFieldCoefficients::basis(3, 4);
    let thetas: Vec<f64> = (0..12).map(|i| 0.1 + i as f64 * PI / 6.0).collect();
    let pts: Vec<[f64; 2]> = thetas.iter().map(|t| [big_r * t.cos(), big_r * t.sin()]).collect();
    let vals = farfield_eval(&out.tensor, &h, &pts).unwrap();
    let amp = (k - 1.0) / (k + 1.0) * r.powi(4) / (big_r * big_r);
    for (t, v) in thetas.iter().zip(vals) {
        let exact = -amp * (2.0 * t).cos();
        assert!((v - exact).abs() < 1e-3 * amp, "θ={t}: {v} vs {exact}");
    }
}

#[test]
fn farfield_respects_expansion_centre() {
    let c = [1.0, -2.0];
    let out = compute(&ComputeRequest::new(ShapeSpec::disk(c, 0.3), 0.5, 2, 128, 3)).unwrap();
    let h = HarmonicFieldCoefficients::basis(1, 2);
    let v = farfield_eval(&out.tensor, &h, &[[c[0] + 1.5, c[1]]]).unwrap()[0];
    let exact = -(0.5 - 1.0) / 1.5 * 0.09 / 1.5;
    assert!((v - exact).abs() < 1e-6 * exact.abs(), "{v} vs {exact}");
    assert!(farfield_eval(&out.tensor, &h, &[[c[0] + 0.2, c[1]]]).is_err());
}
