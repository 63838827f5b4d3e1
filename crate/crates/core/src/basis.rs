//! Harmonic polynomial basis `a_m = Re z^m`, `b_m = Im z^m` with `z = x1 + i x2`.
//!
//! Basis functions are addressed by a 1-based interleaved index: odd indices
//! are `a_{(i+1)/2}`, even indices are `b_{i/2}`. The same index addresses the
//! normal-derivative family `Q_i = ∇P_i · ν`.

use nalgebra::Vector2;

use crate::error::BasisError;

/// Largest supported polynomial degree. Beyond this `|x|^m` under- or
/// overflows for any reasonable normalized geometry.
pub const MAX_DEGREE: usize = 64;

/// Real or imaginary part of `z^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `a_m = Re z^m`
    A,
    /// `b_m = Im z^m`
    B,
}

/// 1-based interleaved index of a harmonic polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(usize);

impl BasisIndex {
    pub fn new(i: usize) -> Result<Self, BasisError> {
        if i == 0 {
            return Err(BasisError::ZeroIndex);
        }
        let idx = BasisIndex(i);
        if idx.degree() > MAX_DEGREE {
            return Err(BasisError::DegreeTooHigh {
                degree: idx.degree(),
                max: MAX_DEGREE,
            });
        }
        Ok(idx)
    }

    pub fn from_parts(degree: usize, parity: Parity) -> Result<Self, BasisError> {
        if degree == 0 {
            return Err(BasisError::ZeroIndex);
        }
        match parity {
            Parity::A => Self::new(2 * degree - 1),
            Parity::B => Self::new(2 * degree),
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Polynomial degree `m = ceil(i / 2)`.
    pub fn degree(self) -> usize {
        self.0.div_ceil(2)
    }

    pub fn parity(self) -> Parity {
        if self.0 % 2 == 1 {
            Parity::A
        } else {
            Parity::B
        }
    }

    /// Label used in tensor documents: `a1`, `b1`, `a2`, ...
    pub fn label(self) -> String {
        match self.parity() {
            Parity::A => format!("a{}", self.degree()),
            Parity::B => format!("b{}", self.degree()),
        }
    }
}

/// Degree of the 1-based interleaved index `i` (no validation).
pub(crate) fn degree_of(i: usize) -> usize {
    i.div_ceil(2)
}

/// Powers `z^0 ..= z^max_degree` as `(re, im)` pairs, by repeated complex
/// multiplication.
pub fn powers(x: Vector2<f64>, max_degree: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(max_degree + 1);
    let (mut re, mut im) = (1.0, 0.0);
    out.push((re, im));
    for _ in 0..max_degree {
        let next_re = re * x.x - im * x.y;
        let next_im = re * x.y + im * x.x;
        re = next_re;
        im = next_im;
        out.push((re, im));
    }
    out
}

fn value_from_powers(pw: &[(f64, f64)], i: BasisIndex) -> f64 {
    let (re, im) = pw[i.degree()];
    match i.parity() {
        Parity::A => re,
        Parity::B => im,
    }
}

fn grad_from_powers(pw: &[(f64, f64)], i: BasisIndex) -> Vector2<f64> {
    // Cauchy-Riemann: d/dz z^m = m z^(m-1)
    let m = i.degree() as f64;
    let (re, im) = pw[i.degree() - 1];
    match i.parity() {
        Parity::A => Vector2::new(m * re, -m * im),
        Parity::B => Vector2::new(m * im, m * re),
    }
}

/// `P_i(x)`.
pub fn eval_p(i: BasisIndex, x: Vector2<f64>) -> f64 {
    value_from_powers(&powers(x, i.degree()), i)
}

/// `∇P_i(x)`.
pub fn eval_grad(i: BasisIndex, x: Vector2<f64>) -> Vector2<f64> {
    grad_from_powers(&powers(x, i.degree()), i)
}

/// `Q_i(x) = ∇P_i(x) · ν`.
pub fn eval_q(i: BasisIndex, x: Vector2<f64>, nu: Vector2<f64>) -> f64 {
    eval_grad(i, x).dot(&nu)
}

/// Tangential derivative `∇P_i(x) · τ`.
pub fn eval_dtau(i: BasisIndex, x: Vector2<f64>, tau: Vector2<f64>) -> f64 {
    eval_grad(i, x).dot(&tau)
}

/// Values of all basis functions `1..=count` at one boundary node.
#[derive(Debug, Clone)]
pub struct NodeValues {
    /// `P_i(x)`
    pub value: Vec<f64>,
    /// `∇P_i(x) · ν`
    pub normal: Vec<f64>,
    /// `∇P_i(x) · τ`
    pub tangential: Vec<f64>,
}

/// Evaluates the first `count` interleaved basis functions, their normal
/// and their tangential derivatives at `x` in one sweep.
pub fn node_values(
    count: usize,
    x: Vector2<f64>,
    nu: Vector2<f64>,
    tau: Vector2<f64>,
) -> NodeValues {
    let pw = powers(x, degree_of(count.max(1)));
    let mut value = Vec::with_capacity(count);
    let mut normal = Vec::with_capacity(count);
    let mut tangential = Vec::with_capacity(count);
    for i in 1..=count {
        let idx = BasisIndex(i);
        let g = grad_from_powers(&pw, idx);
        value.push(value_from_powers(&pw, idx));
        normal.push(g.dot(&nu));
        tangential.push(g.dot(&tau));
    }
    NodeValues {
        value,
        normal,
        tangential,
    }
}
