//! Fundamental solution of the 2-D Laplacian and its boundary kernels.
//!
//! Sign convention: `Γ(x) = +ln|x| / 2π`, so that `ΔΓ = δ`. This is the
//! only place a sign for `Γ` is chosen. With it the single-layer blocks of
//! the Galerkin matrix are negative definite for curves of perimeter below 2
//! and the assembled system reproduces the exact disk transmission solution.

use std::f64::consts::PI;

use nalgebra::Vector2;

use crate::error::SingularPoint;

const INV_TWO_PI: f64 = 0.5 / PI;

/// Pairs closer than this fraction of the local panel length are handled by
/// the coincident-point rules.
pub const NEAR_DIAGONAL_FRACTION: f64 = 1e-3;

/// `Γ(x - y) = ln|x - y| / 2π`.
pub fn gamma(x: Vector2<f64>, y: Vector2<f64>) -> Result<f64, SingularPoint> {
    let r2 = (x - y).norm_squared();
    if r2 == 0.0 {
        return Err(SingularPoint);
    }
    Ok(gamma_r2(r2))
}

#[inline]
pub(crate) fn gamma_r2(r2: f64) -> f64 {
    0.5 * INV_TWO_PI * r2.ln()
}

/// `∂Γ(x - y)/∂ν_x = (x - y)·ν_x / (2π |x - y|²)`.
pub fn dgamma_dnux(
    x: Vector2<f64>,
    nu_x: Vector2<f64>,
    y: Vector2<f64>,
) -> Result<f64, SingularPoint> {
    let d = x - y;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(SingularPoint);
    }
    Ok(INV_TWO_PI * d.dot(&nu_x) / r2)
}

/// `∂Γ(x - y)/∂ν_y = (y - x)·ν_y / (2π |x - y|²)`.
pub fn dgamma_dnuy(
    x: Vector2<f64>,
    y: Vector2<f64>,
    nu_y: Vector2<f64>,
) -> Result<f64, SingularPoint> {
    let d = y - x;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(SingularPoint);
    }
    Ok(INV_TWO_PI * d.dot(&nu_y) / r2)
}

/// Limit of `∂Γ(x - y)/∂ν_x` as `y → x` along a C² curve with signed
/// curvature `curvature` (positive where a counterclockwise curve turns
/// left). Along the curve `x - y = -τ t + κ ν t²/2 + O(t³)`, so the kernel
/// tends to `κ / 4π`.
pub fn diagonal_double_layer(curvature: f64) -> f64 {
    0.25 * curvature / PI
}

/// `∫_{-h/2}^{h/2} ln|t| / 2π dt = h (ln(h/2) - 1) / 2π`: the exact integral of
/// the log kernel over a straight panel of length `h` centred on the
/// singular node.
pub fn diagonal_log_panel(panel_length: f64) -> f64 {
    INV_TWO_PI * panel_length * ((0.5 * panel_length).ln() - 1.0)
}

/// Midpoint defect of the log kernel summed over all neighbouring panels of
/// a uniform grid with spacing `h`: `h (1 - ln π) / 2π`.
///
/// Sampling `ln|t|` at `t = ±h, ±2h, ...` with weight `h` misses
/// `Σ_b h (ln|bh| - avg over panel b)`, which sums in closed form (through
/// `ζ'(0) = -ln(2π)/2`) to the value returned here. Without it the
/// punctured midpoint rule is only first-order accurate.
pub fn log_neighbour_defect(panel_length: f64) -> f64 {
    INV_TWO_PI * panel_length * (1.0 - PI.ln())
}

/// Weight replacing `h·Γ` on the diagonal in the assembled single-layer
/// sums: the analytic self-panel integral plus the neighbour defect,
/// `h ln(h / 2π) / 2π`.
pub fn log_self_weight(panel_length: f64) -> f64 {
    diagonal_log_panel(panel_length) + log_neighbour_defect(panel_length)
}
