//! Analytic reference tensors and error metrics.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::degree_of;
use crate::curve::FrameTransform;
use crate::error::OracleError;
use crate::gpt::ContractedGPT;

/// Cancellation ratio (sum of term magnitudes over the magnitude of the
/// result) above which the ellipse series is rejected.
pub const MAX_CANCELLATION: f64 = 1e8;

fn check(k: f64, lengths: &[f64]) -> Result<(), OracleError> {
    let ok = k > 0.0 && k.is_finite() && lengths.iter().all(|l| *l > 0.0 && l.is_finite());
    if ok {
        Ok(())
    } else {
        Err(OracleError::InvalidParameters)
    }
}

/// Disk of radius `radius`: diagonal with `2πm (k-1)/(k+1) r^(2m)` for both
/// `a_m` and `b_m`.
pub fn exact_disk_gpt(radius: f64, k: f64, n: usize) -> Result<ContractedGPT, OracleError> {
    check(k, &[radius])?;
    let mut g = ContractedGPT::zeros(n, k);
    for i in 0..2 * n {
        let m = degree_of(i + 1);
        g.entries[(i, i)] = 2.0 * PI * m as f64 * (k - 1.0) / (k + 1.0) * radius.powi(2 * m as i32);
    }
    g.support_radius = radius;
    Ok(g)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient of `cosh(m w)` in `(2 cosh w)^n`.
fn chebyshev_weight(n: usize, m: usize) -> f64 {
    2.0 * binomial(n, (n - m) / 2)
}

/// Contracted GPT of the ellipse `(x/a)² + (y/b)² ≤ 1` rotated by `tilt`
/// (radians, counterclockwise) about its centre.
///
/// In elliptic coordinates `z = c cosh(ρ + it)`, `z^n` expands over
/// `cosh(mρ) cos(mt)` and `sinh(mρ) sin(mt)`, for which the transmission
/// problem decouples mode by mode. Collecting the boundary flux integrals
/// gives, for degrees `p ≡ q ≡ m (mod 2)`,
///
/// ```text
/// M(a_p, a_q) = (k-1)π Σ_m m β_pm β_qm 2^-(p+q) (c²)^((p+q)/2 - m)
///                 (a+b)^(2m) (1 - λ^(2m)) / (2 [(1+k) + (1-k) λ^m])
/// ```
///
/// with `λ = (a-b)/(a+b)`, `c² = a² - b²` and `β_nm = 2 C(n, (n-m)/2)`.
/// `M(b_p, b_q)` flips the sign in front of `(1-k)`; mixed entries vanish.
pub fn exact_ellipse_gpt(a: f64, b: f64, tilt: f64, k: f64, n: usize) -> Result<ContractedGPT, OracleError> {
    check(k, &[a, b])?;
    if !tilt.is_finite() {
        return Err(OracleError::InvalidParameters);
    }
    let ratio = a.min(b) / a.max(b);
    if ratio < 1e-6 {
        return Err(OracleError::UnstableSeries { ratio });
    }
    let lambda = (a - b) / (a + b);
    let c2 = a * a - b * b;
    let sum_ab = a + b;

    let entry = |p: usize, q: usize, sign: f64| -> Result<f64, OracleError> {
        if (p + q) % 2 == 1 {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        let mut magnitude = 0.0;
        let mut m = if p.is_multiple_of(2) { 2 } else { 1 };
        while m <= p.min(q) {
            let half = ((p + q) / 2 - m) as i32;
            let geom = c2.powi(half) * sum_ab.powi(2 * m as i32) / 2f64.powi((p + q) as i32);
            let lm = lambda.powi(m as i32);
            let modal = (1.0 - lm * lm) / (2.0 * ((1.0 + k) + sign * (1.0 - k) * lm));
            let term = m as f64 * chebyshev_weight(p, m) * chebyshev_weight(q, m) * geom * modal;
            sum += term;
            magnitude += term.abs();
            m += 2;
        }
        if magnitude > 0.0 && magnitude > MAX_CANCELLATION * sum.abs() {
            return Err(OracleError::UnstableSeries { ratio });
        }
        Ok((k - 1.0) * PI * sum)
    };

    let mut g = ContractedGPT::zeros(n, k);
    for p in 1..=n {
        for q in 1..=n {
            g.entries[(2 * p - 2, 2 * q - 2)] = entry(p, q, 1.0)?;
            g.entries[(2 * p - 1, 2 * q - 1)] = entry(p, q, -1.0)?;
        }
    }
    g.support_radius = a.max(b);
    if tilt != 0.0 {
        g.entries = rotate_tensor(&g.entries, tilt);
    }
    Ok(g)
}

/// Tensor of the inclusion rotated by `angle` about the expansion centre:
/// `T M Tᵀ` with `P_i ∘ R = Σ_k T_ik P_k`.
pub fn rotate_tensor(entries: &DMatrix<f64>, angle: f64) -> DMatrix<f64> {
    let dim = entries.nrows();
    let mut t = DMatrix::zeros(dim, dim);
    for m in 1..=dim / 2 {
        let (s, c) = (m as f64 * angle).sin_cos();
        let (ia, ib) = (2 * m - 2, 2 * m - 1);
        // a_m ∘ R = cos(mθ) a_m - sin(mθ) b_m, b_m ∘ R = sin(mθ) a_m + cos(mθ) b_m
        t[(ia, ia)] = c;
        t[(ia, ib)] = -s;
        t[(ib, ia)] = s;
        t[(ib, ib)] = c;
    }
    &t * entries * t.transpose()
}

/// Comparison of an approximate tensor against a reference.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ErrorReport {
    /// `max_ij |M'_ij - M_ij| / max_{k,l ≥ min(i,j)} |M_kl|`
    pub max_relative: f64,
    pub abs_diff: Vec<Vec<f64>>,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn relative_error(approx: &ContractedGPT, exact: &ContractedGPT) -> Result<ErrorReport, OracleError> {
    relative_error_matrix(&approx.entries, &exact.entries)
}

pub fn relative_error_matrix(approx: &DMatrix<f64>, exact: &DMatrix<f64>) -> Result<ErrorReport, OracleError> {
    if approx.shape() != exact.shape() || !approx.is_square() {
        return Err(OracleError::DimensionMismatch {
            left: approx.nrows(),
            right: exact.nrows(),
        });
    }
    if exact.amax() == 0.0 {
        return Err(OracleError::ZeroReference);
    }
    let dim = exact.nrows();
    // tail[s] = max |M_kl| over k, l ≥ s (0-based)
    let mut tail = vec![0.0f64; dim + 1];
    for s in (0..dim).rev() {
        let mut best = tail[s + 1];
        for t in s..dim {
            best = best.max(exact[(s, t)].abs()).max(exact[(t, s)].abs());
        }
        tail[s] = best;
    }
    let diff = (approx - exact).abs();
    let mut eps = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let d = diff[(i, j)];
            if d == 0.0 {
                continue;
            }
            let denom = tail[i.min(j)];
            eps = eps.max(if denom > 0.0 { d / denom } else { f64::INFINITY });
        }
    }
    Ok(ErrorReport {
        max_relative: eps,
        abs_diff: (0..dim).map(|i| diff.row(i).iter().copied().collect()).collect(),
        l1: diff.iter().sum(),
        l2: diff.iter().map(|v| v * v).sum::<f64>().sqrt(),
        linf: diff.amax(),
    })
}

/// Attaches a frame centred at `center` with unit scale.
pub fn centred(mut g: ContractedGPT, center: [f64; 2]) -> ContractedGPT {
    g.frame = FrameTransform { scale: 1.0, shift: center };
    g
}
