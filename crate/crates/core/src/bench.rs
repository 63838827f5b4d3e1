//! Parameter sweeps behind the accuracy and timing figures.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::curve::ShapeSpec;
use crate::pipeline::{compute, ComputeRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Disk r = 0.5, k = 1/3, order 4: points × polynomial count.
    Fig1,
    /// Disk r = 0.5, order 4, 9 polynomials: contrast × points.
    Fig2,
    /// Disk r = 1, k = 1/3, `2n + 1` polynomials: order × points.
    Fig3,
    /// Ellipse a = 0.01, b = 1, k = 1/3, order 4: points × polynomial count.
    Fig4,
    /// Orders 1 and 10 at the minimal and twice the minimal polynomial count.
    Timing,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Fig1, Suite::Fig2, Suite::Fig3, Suite::Fig4, Suite::Timing];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fig1 => "fig1",
            Suite::Fig2 => "fig2",
            Suite::Fig3 => "fig3",
            Suite::Fig4 => "fig4",
            Suite::Timing => "timing",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}' (expected fig1, fig2, fig3, fig4 or timing)"))
    }
}

/// Polynomial counts swept in the disk and ellipse grids.
pub const FIG1_POLYNOMIALS: [usize; 7] = [3, 5, 7, 9, 12, 16, 21];
pub const FIG4_POLYNOMIALS: [usize; 7] = [6, 8, 10, 12, 16, 20, 24];
pub const POINTS: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];
pub const FIG2_CONTRASTS: [f64; 9] = [0.01, 0.1, 1.0 / 3.0, 0.5, 2.0, 3.0, 5.0, 10.0, 20.0];
pub const FIG3_ORDERS: [usize; 8] = [1, 2, 4, 8, 12, 16, 20, 28];

/// Pairs of harmonic polynomials for a polynomial count (odd counts round up).
pub fn pairs_for_polynomials(count: usize) -> usize {
    count.div_ceil(2)
}

/// One benchmark record. Infeasible configurations have `NaN` error fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub shape: String,
    pub k: f64,
    pub order: usize,
    pub points: usize,
    pub basis_count: usize,
    pub epsilon: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub cond_estimate: f64,
    pub seconds: f64,
}

/// Runs one configuration; failures become a row of `NaN`s.
pub fn run_case(shape: &ShapeSpec, label: &str, k: f64, order: usize, points: usize, pairs: usize) -> BenchRow {
    let req = ComputeRequest::new(shape.clone(), k, order, points, pairs);
    let mut row = BenchRow {
        shape: label.to_string(),
        k,
        order,
        points,
        basis_count: pairs,
        epsilon: f64::NAN,
        l1: f64::NAN,
        l2: f64::NAN,
        linf: f64::NAN,
        cond_estimate: f64::NAN,
        seconds: f64::NAN,
    };
    match compute(&req) {
        Ok(out) => {
            row.cond_estimate = out.cond_estimate;
            row.seconds = out.timings.total;
            if let Some(r) = out.error_report {
                row.epsilon = r.max_relative;
                row.l1 = r.l1;
                row.l2 = r.l2;
                row.linf = r.linf;
            }
        }
        Err(e) => {
            log::info!("{label} k={k} n={order} points={points} pairs={pairs}: {e}");
            if let Some(c) = e.cond_estimate() {
                row.cond_estimate = c;
            }
        }
    }
    row
}

pub fn run_suite(suite: Suite) -> Vec<BenchRow> {
    let third = 1.0 / 3.0;
    let mut rows = Vec::new();
    match suite {
        Suite::Fig1 => {
            let disk = ShapeSpec::disk([0.0, 0.0], 0.5);
            for &p in &POINTS {
                for &c in &FIG1_POLYNOMIALS {
                    rows.push(run_case(&disk, "disk", third, 4, p, pairs_for_polynomials(c)));
                }
            }
        }
        Suite::Fig2 => {
            let disk = ShapeSpec::disk([0.0, 0.0], 0.5);
            for &k in &FIG2_CONTRASTS {
                for &p in &POINTS[2..] {
                    rows.push(run_case(&disk, "disk", k, 4, p, pairs_for_polynomials(9)));
                }
            }
        }
        Suite::Fig3 => {
            let disk = ShapeSpec::disk([0.0, 0.0], 1.0);
            for &n in &FIG3_ORDERS {
                for &p in &POINTS {
                    rows.push(run_case(&disk, "disk", third, n, p, pairs_for_polynomials(2 * n + 1)));
                }
            }
        }
        Suite::Fig4 => {
            let ellipse = ShapeSpec::ellipse([0.0, 0.0], 0.01, 1.0, 0.0);
            for &p in &POINTS[1..] {
                for &c in &FIG4_POLYNOMIALS {
                    rows.push(run_case(&ellipse, "ellipse", third, 4, p, pairs_for_polynomials(c)));
                }
            }
        }
        Suite::Timing => {
            let disk = ShapeSpec::disk([0.0, 0.0], 1.0);
            for (order, counts) in [(1usize, [3usize, 6]), (10, [21, 42])] {
                for c in counts {
                    for p in [16usize, 256, 1024] {
                        rows.push(run_case(&disk, "disk", third, order, p, pairs_for_polynomials(c)));
                    }
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("fig9".parse::<Suite>().is_err());
    }

    #[test]
    fn polynomial_counts_round_up() {
        assert_eq!(pairs_for_polynomials(9), 5);
        assert_eq!(pairs_for_polynomials(12), 6);
        assert_eq!(pairs_for_polynomials(3), 2);
    }

    #[test]
    fn infeasible_case_is_nan() {
        let disk = ShapeSpec::disk([0.0, 0.0], 0.5);
        let row = run_case(&disk, "disk", 0.5, 4, 64, 2);
        assert!(row.epsilon.is_nan());
        let row = run_case(&disk, "disk", 0.5, 4, 64, 5);
        assert!(row.epsilon < 1e-2);
    }
}
