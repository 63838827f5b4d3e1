//! Dense direct solve of the Galerkin system with a condition estimate.
//!
//! Block entries scale like `r^(m_i + m_j)` with the polynomial degree, so
//! the raw matrix has a condition number that grows geometrically with the
//! basis size even when the problem is benign. Both the solve and the
//! reported estimate use the symmetrically equilibrated matrix
//! `D M D` with `D = diag(|M_ii|^(-1/2))`.

use nalgebra::{DMatrix, DVector};

use crate::assembly::GalerkinSystem;
use crate::error::SolveError;

/// Condition estimates above this are treated as a numerically singular
/// system.
pub const SINGULAR_THRESHOLD: f64 = 1e14;

/// Boundary coefficients of all source polynomials.
///
/// Column `j` belongs to the source `P_{j+1}` (interleaved `a_1, b_1, a_2,
/// ...`). Rows `0..n_p` are trace coefficients in the `P` basis, rows
/// `n_p..n_p + n_q` flux coefficients in the `Q` basis.
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub x: DMatrix<f64>,
    pub n_p: usize,
    pub n_q: usize,
    pub cond_estimate: f64,
}

impl BoundarySolution {
    /// Trace coefficients (`n_p x n_q`).
    pub fn trace(&self) -> DMatrix<f64> {
        self.x.rows(0, self.n_p).into_owned()
    }

    /// Flux coefficients (`n_q x n_q`).
    pub fn flux(&self) -> DMatrix<f64> {
        self.x.rows(self.n_p, self.n_q).into_owned()
    }
}

fn equilibration(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(
        m.nrows(),
        (0..m.nrows()).map(|i| {
            let d = m[(i, i)].abs();
            if d > 0.0 && d.is_finite() {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        }),
    )
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager–Higham estimate of `‖A⁻¹‖₁` from solves with `A` and `Aᵀ`.
fn inverse_norm1_estimate<S, T>(n: usize, solve: S, solve_t: T) -> Option<f64>
where
    S: Fn(&DVector<f64>) -> Option<DVector<f64>>,
    T: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for iter in 0..5 {
        let y = solve(&x)?;
        est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve_t(&xi)?;
        let j = z.iamax();
        if iter > 0 && (z[j].abs() <= z.dot(&x) || j == last_j) {
            break;
        }
        last_j = j;
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    let alt = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 + i as f64 / (n.max(2) - 1) as f64)
        }),
    );
    let y = solve(&alt)?;
    Some(f64::max(est, 2.0 * y.lp_norm(1) / (3.0 * n as f64)))
}

/// Estimated 1-norm condition number of the equilibrated system matrix.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let d = equilibration(m);
    let a = DMatrix::from_diagonal(&d) * m * DMatrix::from_diagonal(&d);
    let lu = a.clone().lu();
    let lu_t = a.transpose().lu();
    match inverse_norm1_estimate(a.nrows(), |b| lu.solve(b), |b| lu_t.solve(b)) {
        Some(inv) if inv.is_finite() => (norm1(&a) * inv).max(1.0),
        _ => f64::INFINITY,
    }
}

/// Solves `M X = B` by LU with partial pivoting on the equilibrated system.
pub fn solve_system(sys: &GalerkinSystem) -> Result<BoundarySolution, SolveError> {
    let n = sys.matrix.nrows();
    let d = equilibration(&sys.matrix);
    let dm = DMatrix::from_diagonal(&d);
    let a = &dm * &sys.matrix * &dm;
    let b = &dm * &sys.rhs;

    let lu = a.clone().lu();
    let lu_t = a.transpose().lu();
    let inv = inverse_norm1_estimate(n, |v| lu.solve(v), |v| lu_t.solve(v));
    let cond_estimate = match inv {
        Some(v) if v.is_finite() => (norm1(&a) * v).max(1.0),
        _ => f64::INFINITY,
    };
    log::debug!("equilibrated condition estimate {cond_estimate:.3e}");
    if cond_estimate.is_nan() || cond_estimate > SINGULAR_THRESHOLD {
        return Err(SolveError::IllConditioned { cond_estimate });
    }
    let y = lu
        .solve(&b)
        .ok_or(SolveError::IllConditioned { cond_estimate })?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::IllConditioned { cond_estimate });
    }

    let b_norm = b.norm();
    let residual = if b_norm > 0.0 {
        (&a * &y - &b).norm() / b_norm
    } else {
        (&a * &y).norm()
    };
    if residual > 1e-10 * cond_estimate {
        return Err(SolveError::Residual {
            residual,
            cond_estimate,
        });
    }

    Ok(BoundarySolution {
        x: dm * y,
        n_p: sys.n_p,
        n_q: sys.n_q,
        cond_estimate,
    })
}

/// Columnwise relative residuals `‖M x_j - b_j‖ / ‖b_j‖` of a candidate
/// coefficient matrix.
pub fn column_residuals(sys: &GalerkinSystem, x: &DMatrix<f64>) -> Vec<f64> {
    let r = &sys.matrix * x - &sys.rhs;
    (0..x.ncols())
        .map(|j| {
            let bn = sys.rhs.column(j).norm();
            let rn = r.column(j).norm();
            if bn > 0.0 {
                rn / bn
            } else {
                rn
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_matches_exact_norm_on_small_matrices() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let inv = a.clone().try_inverse().unwrap();
        let exact = norm1(&a) * norm1(&inv);
        let est = condition_estimate(&a);
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= exact / 3.0, "{est} vs {exact}");
    }

    #[test]
    fn diagonal_scaling_is_removed() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-8, 1e-16]));
        assert!((condition_estimate(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_infinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(condition_estimate(&a) > SINGULAR_THRESHOLD);
    }
}
