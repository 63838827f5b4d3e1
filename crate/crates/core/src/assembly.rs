//! Galerkin matrix and right-hand side of the weak transmission system.
//!
//! With trial/test spaces `span(P_1..P_np)` for the trace and
//! `span(Q_1..Q_nq)` for the interior flux, the system reads
//!
//! ```text
//! M = [ (k+1) P    2k N    ]      B = [ S/2 - N[:, ..nq] ]
//!     [ -2 N^T     (k+1) Q ]          [ -Q               ]
//! ```
//!
//! where `P_ij = ∬ ∂τP_i(y) ∂τP_j(x) Γ(x-y)`, `Q_ij = ∬ Q_i(y) Q_j(x) Γ(x-y)`,
//! `N_ij = ∬ Q_j(y) P_i(x) ∂Γ(x-y)/∂ν_x` and `S_ij = ∫ Q_j P_i`. Column `j`
//! of `B` is the source polynomial `P_j` (same interleaved indexing).
//!
//! All double integrals use the panel midpoint rule. Coincident panels use
//! [`kernel::log_self_weight`] for `Γ` and [`kernel::diagonal_double_layer`]
//! for `∂Γ/∂ν_x`.

use nalgebra::DMatrix;

use crate::basis;
use crate::curve::{BoundaryCurve, FrameTransform};
use crate::error::AssemblyError;
use crate::kernel::{self, NEAR_DIAGONAL_FRACTION};

/// Assembled block system for one curve, basis size and contrast.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub n_p: usize,
    pub n_q: usize,
    pub contrast: f64,
    pub p_block: DMatrix<f64>,
    pub n_block: DMatrix<f64>,
    pub q_block: DMatrix<f64>,
    /// `(n_p + n_q) x (n_p + n_q)`
    pub matrix: DMatrix<f64>,
    /// `(n_p + n_q) x n_q`
    pub rhs: DMatrix<f64>,
    pub frame: FrameTransform,
}

/// Per-node basis tables, `nodes x count`.
struct BasisTables {
    value: DMatrix<f64>,
    normal: DMatrix<f64>,
    tangential: DMatrix<f64>,
}

fn tables(curve: &BoundaryCurve, count: usize) -> Result<BasisTables, AssemblyError> {
    basis::BasisIndex::new(count)?;
    let n = curve.len();
    let mut value = DMatrix::zeros(n, count);
    let mut normal = DMatrix::zeros(n, count);
    let mut tangential = DMatrix::zeros(n, count);
    for a in 0..n {
        let nv = basis::node_values(
            count,
            curve.nodes()[a],
            curve.normals()[a],
            curve.tangents()[a],
        );
        for i in 0..count {
            value[(a, i)] = nv.value[i];
            normal[(a, i)] = nv.normal[i];
            tangential[(a, i)] = nv.tangential[i];
        }
    }
    Ok(BasisTables {
        value,
        normal,
        tangential,
    })
}

fn check_curve(curve: &BoundaryCurve) -> Result<(), AssemblyError> {
    let perimeter = curve.perimeter();
    if perimeter.is_nan() || perimeter >= 2.0 {
        return Err(AssemblyError::NotNormalized { perimeter });
    }
    Ok(())
}

fn is_diagonal(curve: &BoundaryCurve, a: usize, b: usize, r2: f64) -> bool {
    let tol = NEAR_DIAGONAL_FRACTION * curve.weights()[a];
    a == b || r2 < tol * tol
}

/// `out[a, :] = Σ_b w_a w_b Γ(x_a - x_b) dens[b, :]`, with the self weight
/// on the diagonal. Streams one kernel row at a time.
fn apply_single_layer(curve: &BoundaryCurve, dens: &DMatrix<f64>) -> DMatrix<f64> {
    let n = curve.len();
    let nodes = curve.nodes();
    let w = curve.weights();
    let mut row = vec![0.0; n];
    let mut out = DMatrix::zeros(n, dens.ncols());
    for a in 0..n {
        let xa = nodes[a];
        for b in 0..n {
            let r2 = (xa - nodes[b]).norm_squared();
            row[b] = if is_diagonal(curve, a, b, r2) {
                w[a] * kernel::log_self_weight(w[a])
            } else {
                w[a] * w[b] * kernel::gamma_r2(r2)
            };
        }
        for j in 0..dens.ncols() {
            let col = dens.column(j);
            let s: f64 = row.iter().zip(col.iter()).map(|(k, d)| k * d).sum();
            out[(a, j)] = s;
        }
    }
    out
}

/// `out[a, :] = Σ_b w_a w_b ∂Γ(x_a - x_b)/∂ν_a dens[b, :]`.
fn apply_double_layer(curve: &BoundaryCurve, dens: &DMatrix<f64>) -> DMatrix<f64> {
    let n = curve.len();
    let nodes = curve.nodes();
    let normals = curve.normals();
    let w = curve.weights();
    let inv_two_pi = 0.5 / std::f64::consts::PI;
    let mut row = vec![0.0; n];
    let mut out = DMatrix::zeros(n, dens.ncols());
    for a in 0..n {
        let xa = nodes[a];
        let nu = normals[a];
        for b in 0..n {
            let d = xa - nodes[b];
            let r2 = d.norm_squared();
            row[b] = if is_diagonal(curve, a, b, r2) {
                w[a] * w[b] * kernel::diagonal_double_layer(curve.curvature()[a])
            } else {
                w[a] * w[b] * inv_two_pi * d.dot(&nu) / r2
            };
        }
        for j in 0..dens.ncols() {
            let col = dens.column(j);
            let s: f64 = row.iter().zip(col.iter()).map(|(k, d)| k * d).sum();
            out[(a, j)] = s;
        }
    }
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn single_layer_block(curve: &BoundaryCurve, dens: &DMatrix<f64>) -> DMatrix<f64> {
    let applied = apply_single_layer(curve, dens);
    let mut block = dens.transpose() * applied;
    symmetrize(&mut block);
    block
}

/// `P` block (`2 n1 x 2 n1`): single layer between tangential derivatives.
pub fn assemble_p(curve: &BoundaryCurve, n1: usize) -> Result<DMatrix<f64>, AssemblyError> {
    check_curve(curve)?;
    let t = tables(curve, 2 * n1)?;
    Ok(single_layer_block(curve, &t.tangential))
}

/// `Q` block (`2 n2 x 2 n2`): single layer between normal derivatives.
pub fn assemble_q(curve: &BoundaryCurve, n2: usize) -> Result<DMatrix<f64>, AssemblyError> {
    check_curve(curve)?;
    let t = tables(curve, 2 * n2)?;
    Ok(single_layer_block(curve, &t.normal))
}

/// `N` block (`2 n1 x 2 n2`): `N_ij = ∬ Q_j(y) P_i(x) ∂Γ(x-y)/∂ν_x`.
pub fn assemble_n(curve: &BoundaryCurve, n1: usize, n2: usize) -> Result<DMatrix<f64>, AssemblyError> {
    check_curve(curve)?;
    let tp = tables(curve, 2 * n1)?;
    let tq = tables(curve, 2 * n2)?;
    Ok(tp.value.transpose() * apply_double_layer(curve, &tq.normal))
}

/// Right-hand side (`(2 n1 + 2 n2) x 2 n2`) for the sources `P_1..P_{2 n2}`.
pub fn assemble_b(curve: &BoundaryCurve, n1: usize, n2: usize) -> Result<DMatrix<f64>, AssemblyError> {
    let n_block = assemble_n(curve, n1, n2)?;
    let q_block = assemble_q(curve, n2)?;
    let tp = tables(curve, 2 * n1)?;
    let tq = tables(curve, 2 * n2)?;
    Ok(rhs_from_blocks(curve, &tp, &tq, &n_block, &q_block))
}

fn rhs_from_blocks(
    curve: &BoundaryCurve,
    tp: &BasisTables,
    tq: &BasisTables,
    n_block: &DMatrix<f64>,
    q_block: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (n_p, n_q) = (tp.value.ncols(), tq.normal.ncols());
    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(curve.weights()));
    // S_ij = ∫ Q_j P_i
    let s = tp.value.transpose() * &w * &tq.normal;
    let mut rhs = DMatrix::zeros(n_p + n_q, n_q);
    rhs.view_mut((0, 0), (n_p, n_q)).copy_from(&(s * 0.5 - n_block));
    rhs.view_mut((n_p, 0), (n_q, n_q)).copy_from(&(-q_block));
    rhs
}

/// Assembles the full system for a normalized curve. `frame` is carried
/// through for de-normalizing the extracted tensor.
pub fn assemble(
    curve: &BoundaryCurve,
    frame: FrameTransform,
    n1: usize,
    n2: usize,
    contrast: f64,
) -> Result<GalerkinSystem, AssemblyError> {
    check_curve(curve)?;
    if n1 == 0 || n2 == 0 {
        return Err(AssemblyError::EmptyBasis { n1, n2 });
    }
    if !(contrast > 0.0 && contrast.is_finite()) {
        return Err(AssemblyError::InvalidContrast(contrast));
    }
    let (n_p, n_q) = (2 * n1, 2 * n2);
    let tp = tables(curve, n_p)?;
    let tq = tables(curve, n_q)?;

    // one single-layer sweep for both densities
    let mut dens = DMatrix::zeros(curve.len(), n_p + n_q);
    dens.view_mut((0, 0), (curve.len(), n_p)).copy_from(&tp.tangential);
    dens.view_mut((0, n_p), (curve.len(), n_q)).copy_from(&tq.normal);
    let applied = apply_single_layer(curve, &dens);
    let mut p_block = tp.tangential.transpose() * applied.columns(0, n_p);
    let mut q_block = tq.normal.transpose() * applied.columns(n_p, n_q);
    symmetrize(&mut p_block);
    symmetrize(&mut q_block);

    let n_block = tp.value.transpose() * apply_double_layer(curve, &tq.normal);

    let k = contrast;
    let dim = n_p + n_q;
    let mut matrix = DMatrix::zeros(dim, dim);
    matrix.view_mut((0, 0), (n_p, n_p)).copy_from(&(&p_block * (k + 1.0)));
    matrix.view_mut((0, n_p), (n_p, n_q)).copy_from(&(&n_block * (2.0 * k)));
    matrix.view_mut((n_p, 0), (n_q, n_p)).copy_from(&(n_block.transpose() * -2.0));
    matrix.view_mut((n_p, n_p), (n_q, n_q)).copy_from(&(&q_block * (k + 1.0)));

    let rhs = rhs_from_blocks(curve, &tp, &tq, &n_block, &q_block);
    Ok(GalerkinSystem {
        n_p,
        n_q,
        contrast,
        p_block,
        n_block,
        q_block,
        matrix,
        rhs,
        frame,
    })
}

/// Writes a matrix as comma-separated rows.
pub fn dump_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
