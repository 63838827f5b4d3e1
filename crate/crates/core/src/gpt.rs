//! Contracted GPT extraction, de-normalization and far-field evaluation.
//!
//! Entry `(i, j)` of a tensor of order `n` is `M(P_i, P_j)` for the
//! interleaved basis `a_1, b_1, ..., a_n, b_n`.

use nalgebra::{DMatrix, Vector2};

use crate::basis::{self, degree_of};
use crate::curve::{BoundaryCurve, FrameTransform};
use crate::error::GptError;
use crate::solve::BoundarySolution;

/// Sign of the far-field perturbation relative to the tensor, fixed by the
/// analytic disk solution.
pub const FARFIELD_SIGN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ContractedGPT {
    pub order: usize,
    /// `2 order x 2 order`
    pub entries: DMatrix<f64>,
    pub contrast: f64,
    /// Frame the entries are expressed in. After [`unscale`] the scale is 1
    /// and the shift is the expansion centre.
    pub frame: FrameTransform,
    /// Radius of the smallest centred circle containing the inclusion, in
    /// the original frame. The far-field expansion is only valid outside it.
    pub support_radius: f64,
}

/// `H(x) = H(0) + Σ α_n a_n(x) + β_n b_n(x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicFieldCoefficients {
    pub constant: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl HarmonicFieldCoefficients {
    /// The single basis polynomial `P_i` (1-based interleaved index).
    pub fn basis(i: usize, order: usize) -> Self {
        let mut h = HarmonicFieldCoefficients {
            constant: 0.0,
            alpha: vec![0.0; order],
            beta: vec![0.0; order],
        };
        let m = degree_of(i);
        if m >= 1 && m <= order {
            if i % 2 == 1 {
                h.alpha[m - 1] = 1.0;
            } else {
                h.beta[m - 1] = 1.0;
            }
        }
        h
    }
}

impl ContractedGPT {
    pub fn zeros(order: usize, contrast: f64) -> Self {
        ContractedGPT {
            order,
            entries: DMatrix::zeros(2 * order, 2 * order),
            contrast,
            frame: FrameTransform::identity(),
            support_radius: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.order
    }

    /// Harmonic degrees `(m_i, m_j)` of the 0-based entry `(i, j)`.
    pub fn degrees(i: usize, j: usize) -> (usize, usize) {
        (degree_of(i + 1), degree_of(j + 1))
    }

    pub fn labels(&self) -> Vec<String> {
        (1..=self.dim())
            .map(|i| basis::BasisIndex::new(i).map(|b| b.label()).unwrap_or_default())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }

    /// `max |M - Mᵀ| / max |M|` (0 for the zero tensor).
    pub fn asymmetry(&self) -> f64 {
        let scale = self.entries.amax();
        if scale == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.transpose()).amax() / scale
    }
}

fn check_order(sol: &BoundarySolution, n: usize) -> Result<(), GptError> {
    if n == 0 {
        return Err(GptError::ZeroOrder);
    }
    let max = sol.n_p.min(sol.n_q) / 2;
    if n > max {
        return Err(GptError::OrderTooLarge { order: n, max });
    }
    Ok(())
}

struct Tables {
    value: DMatrix<f64>,
    normal: DMatrix<f64>,
}

fn tables(curve: &BoundaryCurve, count: usize) -> Tables {
    let n = curve.len();
    let mut value = DMatrix::zeros(n, count);
    let mut normal = DMatrix::zeros(n, count);
    for a in 0..n {
        let nv = basis::node_values(count, curve.nodes()[a], curve.normals()[a], curve.tangents()[a]);
        for i in 0..count {
            value[(a, i)] = nv.value[i];
            normal[(a, i)] = nv.normal[i];
        }
    }
    Tables { value, normal }
}

fn weighted(curve: &BoundaryCurve, m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (a, w) in curve.weights().iter().enumerate() {
        out.row_mut(a).scale_mut(*w);
    }
    out
}

fn finish(
    entries: DMatrix<f64>,
    n: usize,
    k: f64,
    curve: &BoundaryCurve,
    frame: FrameTransform,
) -> ContractedGPT {
    ContractedGPT {
        order: n,
        entries,
        contrast: k,
        frame,
        support_radius: curve.radius_about(Vector2::zeros()) / frame.scale,
    }
}

/// `M(P_i, P_j) = (k-1) ∫ P_i (Q_j + (k-1) v^{P_j})`, with `v` the flux
/// coefficients. `curve` is the normalized curve the system was assembled on.
pub fn extract_flux(
    sol: &BoundarySolution,
    curve: &BoundaryCurve,
    k: f64,
    n: usize,
    frame: FrameTransform,
) -> Result<ContractedGPT, GptError> {
    check_order(sol, n)?;
    let dim = 2 * n;
    let t = tables(curve, sol.n_q.max(dim));
    let q_sources = t.normal.columns(0, dim).into_owned();
    let v = t.normal.columns(0, sol.n_q) * sol.x.view((sol.n_p, 0), (sol.n_q, dim));
    let flux = q_sources + v * (k - 1.0);
    let lhs = weighted(curve, &t.value.columns(0, dim).into_owned());
    let entries = lhs.transpose() * flux * (k - 1.0);
    Ok(finish(entries, n, k, curve, frame))
}

/// `M(P_i, P_j) = (k-1) ∫ Q_i (P_j + (k-1) u^{P_j})`, with `u` the trace
/// coefficients.
pub fn extract_trace(
    sol: &BoundarySolution,
    curve: &BoundaryCurve,
    k: f64,
    n: usize,
    frame: FrameTransform,
) -> Result<ContractedGPT, GptError> {
    check_order(sol, n)?;
    let dim = 2 * n;
    let t = tables(curve, sol.n_p.max(dim));
    let p_sources = t.value.columns(0, dim).into_owned();
    let u = t.value.columns(0, sol.n_p) * sol.x.view((0, 0), (sol.n_p, dim));
    let trace = p_sources + u * (k - 1.0);
    let lhs = weighted(curve, &t.normal.columns(0, dim).into_owned());
    let entries = lhs.transpose() * trace * (k - 1.0);
    Ok(finish(entries, n, k, curve, frame))
}

/// Expresses the tensor in the original frame: entry `(i, j)` is multiplied
/// by `s^-(m_i + m_j)`.
pub fn unscale(gpt: &ContractedGPT) -> ContractedGPT {
    let s = gpt.frame.scale;
    let mut out = gpt.clone();
    if s != 1.0 {
        let inv = 1.0 / s;
        let pw: Vec<f64> = (0..gpt.dim()).map(|i| inv.powi(degree_of(i + 1) as i32)).collect();
        for i in 0..gpt.dim() {
            for j in 0..gpt.dim() {
                out.entries[(i, j)] = gpt.entries[(i, j)] * pw[i] * pw[j];
            }
        }
    }
    out.frame = FrameTransform {
        scale: 1.0,
        shift: gpt.frame.shift,
    };
    out
}

/// Contracted far-field expansion of `u - H` at each point, truncated at
/// the tensor order. `gpt` must be in its original frame.
pub fn farfield_eval(
    gpt: &ContractedGPT,
    h: &HarmonicFieldCoefficients,
    points: &[[f64; 2]],
) -> Result<Vec<f64>, GptError> {
    let n = gpt.order;
    let dim = gpt.dim();
    let coef = |list: &[f64], m: usize| list.get(m).copied().unwrap_or(0.0);
    // c_i = Σ_j M(P_i, P_j) h_j
    let hv = nalgebra::DVector::from_iterator(
        dim,
        (0..dim).map(|j| {
            let m = j / 2;
            if j % 2 == 0 {
                coef(&h.alpha, m)
            } else {
                coef(&h.beta, m)
            }
        }),
    );
    let c = &gpt.entries * hv;
    let center = Vector2::from(gpt.frame.shift);

    points
        .iter()
        .map(|p| {
            let x = (Vector2::from(*p) - center) * gpt.frame.scale;
            let r2 = x.norm_squared();
            let radius = gpt.support_radius * gpt.frame.scale;
            if r2.sqrt() <= radius {
                return Err(GptError::InsideSupport {
                    x: p[0],
                    y: p[1],
                    radius: gpt.support_radius,
                });
            }
            let pw = basis::powers(x, n);
            let mut sum = 0.0;
            let mut r2m = 1.0;
            for m in 1..=n {
                r2m *= r2;
                let denom = 2.0 * std::f64::consts::PI * m as f64 * r2m;
                let (re, im) = pw[m];
                sum += (re * c[2 * m - 2] + im * c[2 * m - 1]) / denom;
            }
            Ok(FARFIELD_SIGN * sum)
        })
        .collect()
}
