//! Inclusion boundaries: shape descriptions, panel discretization and the
//! normalization frame.
//!
//! A [`BoundaryCurve`] is a closed, counterclockwise chain of `n` panels.
//! Panel `i` runs from `breakpoints[i]` to `breakpoints[i + 1]` (cyclic), has
//! arclength `weights[i]` and is sampled at a single node `nodes[i]` where
//! the unit tangent, outward unit normal and signed curvature are stored.

use std::f64::consts::PI;

use nalgebra::{Rotation2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::ShapeError;
use crate::quadrature;

/// Smallest accepted number of boundary points.
pub const MIN_POINTS: usize = 8;

/// Default perimeter bound parameter: normalized curves have perimeter ≤ 2κ.
pub const DEFAULT_KAPPA: f64 = 0.5;

/// User-level description of an inclusion shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ShapeSpec {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    /// Ellipse with semi-axis `a` along the (tilted) first axis and `b`
    /// along the second. `tilt` is in radians.
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
        #[serde(default)]
        tilt: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// Dense closed polyline, typically a traced bitmap outline.
    Contour {
        points: Vec<[f64; 2]>,
    },
}

impl ShapeSpec {
    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        ShapeSpec::Disk { center, radius }
    }

    pub fn ellipse(center: [f64; 2], a: f64, b: f64, tilt: f64) -> Self {
        ShapeSpec::Ellipse { center, a, b, tilt }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ShapeSpec::Disk { .. } => "disk",
            ShapeSpec::Ellipse { .. } => "ellipse",
            ShapeSpec::Polygon { .. } => "polygon",
            ShapeSpec::Contour { .. } => "contour",
        }
    }

    pub fn validate(&self) -> Result<(), ShapeError> {
        let finite = |p: &[f64; 2]| p[0].is_finite() && p[1].is_finite();
        match self {
            ShapeSpec::Disk { center, radius } => {
                if !finite(center) || !radius.is_finite() {
                    return Err(ShapeError::NonFinite);
                }
                if *radius <= 0.0 {
                    return Err(ShapeError::NonPositiveRadius(*radius));
                }
            }
            ShapeSpec::Ellipse { center, a, b, tilt } => {
                if !finite(center) || !a.is_finite() || !b.is_finite() || !tilt.is_finite() {
                    return Err(ShapeError::NonFinite);
                }
                if *a <= 0.0 || *b <= 0.0 {
                    return Err(ShapeError::NonPositiveAxes { a: *a, b: *b });
                }
            }
            ShapeSpec::Polygon { vertices: pts } | ShapeSpec::Contour { points: pts } => {
                if pts.iter().any(|p| !finite(p)) {
                    return Err(ShapeError::NonFinite);
                }
                let pts: Vec<Vector2<f64>> = dedup_closed(pts);
                if pts.len() < 3 {
                    return Err(ShapeError::TooFewVertices(pts.len()));
                }
                check_simple(&pts)?;
                if polygon_area(&pts).abs() <= 0.0 {
                    return Err(ShapeError::Degenerate);
                }
            }
        }
        Ok(())
    }
}

/// Scale/shift applied to put a curve in the normalized frame:
/// `x' = (x - shift) * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTransform {
    pub scale: f64,
    pub shift: [f64; 2],
}

impl Default for FrameTransform {
    fn default() -> Self {
        FrameTransform::identity()
    }
}

impl FrameTransform {
    pub fn identity() -> Self {
        FrameTransform {
            scale: 1.0,
            shift: [0.0, 0.0],
        }
    }

    pub fn apply(&self, x: Vector2<f64>) -> Vector2<f64> {
        (x - Vector2::from(self.shift)) * self.scale
    }

    pub fn invert(&self, x: Vector2<f64>) -> Vector2<f64> {
        x / self.scale + Vector2::from(self.shift)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    nodes: Vec<Vector2<f64>>,
    tangents: Vec<Vector2<f64>>,
    normals: Vec<Vector2<f64>>,
    weights: Vec<f64>,
    curvature: Vec<f64>,
    breakpoints: Vec<Vector2<f64>>,
    perimeter: f64,
    centroid: Vector2<f64>,
}

impl BoundaryCurve {
    /// Builds a curve from per-panel data. Normals are derived from the
    /// tangents (`ν = τ` turned by `-π/2`).
    fn from_panels(
        nodes: Vec<Vector2<f64>>,
        tangents: Vec<Vector2<f64>>,
        weights: Vec<f64>,
        curvature: Vec<f64>,
        breakpoints: Vec<Vector2<f64>>,
    ) -> Self {
        let tangents: Vec<Vector2<f64>> = tangents.into_iter().map(|t| t.normalize()).collect();
        let normals = tangents.iter().map(|t| Vector2::new(t.y, -t.x)).collect();
        let perimeter = weights.iter().sum();
        let mut curve = BoundaryCurve {
            nodes,
            tangents,
            normals,
            weights,
            curvature,
            breakpoints,
            perimeter,
            centroid: Vector2::zeros(),
        };
        curve.centroid = curve.area_centroid().1;
        curve
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vector2<f64>] {
        &self.nodes
    }

    pub fn tangents(&self) -> &[Vector2<f64>] {
        &self.tangents
    }

    pub fn normals(&self) -> &[Vector2<f64>] {
        &self.normals
    }

    /// Panel arclengths.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// Panel start points; panel `i` ends at `breakpoints[(i + 1) % n]`.
    pub fn breakpoints(&self) -> &[Vector2<f64>] {
        &self.breakpoints
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Vector2<f64> {
        self.centroid
    }

    /// Largest distance from `center` to a node or panel breakpoint.
    pub fn radius_about(&self, center: Vector2<f64>) -> f64 {
        self.nodes
            .iter()
            .chain(&self.breakpoints)
            .map(|p| (p - center).norm())
            .fold(0.0, f64::max)
    }

    /// Shoelace area and centroid of the polygon that alternates panel
    /// breakpoints and nodes.
    pub fn area_centroid(&self) -> (f64, Vector2<f64>) {
        let ring: Vec<Vector2<f64>> = self
            .breakpoints
            .iter()
            .zip(&self.nodes)
            .flat_map(|(b, n)| [*b, *n])
            .collect();
        // accumulate relative to a local origin to limit cancellation
        let origin = ring[0];
        let mut twice_area = 0.0;
        let mut moment = Vector2::zeros();
        for k in 0..ring.len() {
            let p = ring[k] - origin;
            let q = ring[(k + 1) % ring.len()] - origin;
            let cross = p.x * q.y - p.y * q.x;
            twice_area += cross;
            moment += (p + q) * cross;
        }
        let area = 0.5 * twice_area;
        let centroid = if area != 0.0 {
            origin + moment / (6.0 * area)
        } else {
            origin
        };
        (area, centroid)
    }

    /// Returns the curve mapped by `x -> (x - shift) * scale`.
    pub fn transformed(&self, frame: &FrameTransform) -> BoundaryCurve {
        let s = frame.scale;
        BoundaryCurve {
            nodes: self.nodes.iter().map(|p| frame.apply(*p)).collect(),
            tangents: self.tangents.clone(),
            normals: self.normals.clone(),
            weights: self.weights.iter().map(|w| w * s).collect(),
            curvature: self.curvature.iter().map(|k| k / s).collect(),
            breakpoints: self.breakpoints.iter().map(|p| frame.apply(*p)).collect(),
            perimeter: self.perimeter * s,
            centroid: frame.apply(self.centroid),
        }
    }

    /// Rotates the curve by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> BoundaryCurve {
        let rot = Rotation2::new(angle);
        let map = |v: &Vec<Vector2<f64>>| v.iter().map(|p| rot * p).collect::<Vec<_>>();
        BoundaryCurve {
            nodes: map(&self.nodes),
            tangents: map(&self.tangents),
            normals: map(&self.normals),
            weights: self.weights.clone(),
            curvature: self.curvature.clone(),
            breakpoints: map(&self.breakpoints),
            perimeter: self.perimeter,
            centroid: rot * self.centroid,
        }
    }

    /// Perturbs node positions by `offsets` (same length), keeping frames and
    /// weights. Used for sensitivity checks.
    pub fn with_node_offsets(&self, offsets: &[Vector2<f64>]) -> BoundaryCurve {
        let mut out = self.clone();
        for (p, d) in out.nodes.iter_mut().zip(offsets) {
            *p += d;
        }
        out
    }
}

/// Discretizes `spec` into `n_points` panels.
///
/// Disks and ellipses use an equal-parameter partition with exact panel
/// arclengths and analytic frames. Polygons get panels that never straddle
/// a corner, so tangents are exact edge directions. Contours are resampled at
/// equal arclength with finite-difference tangents and curvature.
pub fn discretize(spec: &ShapeSpec, n_points: usize) -> Result<BoundaryCurve, ShapeError> {
    if n_points < MIN_POINTS {
        return Err(ShapeError::TooFewPoints {
            got: n_points,
            min: MIN_POINTS,
        });
    }
    spec.validate()?;
    let curve = match spec {
        ShapeSpec::Disk { center, radius } => {
            discretize_ellipse(Vector2::from(*center), *radius, *radius, 0.0, n_points)
        }
        ShapeSpec::Ellipse { center, a, b, tilt } => {
            discretize_ellipse(Vector2::from(*center), *a, *b, *tilt, n_points)
        }
        ShapeSpec::Polygon { vertices } => discretize_polygon(vertices, n_points)?,
        ShapeSpec::Contour { points } => discretize_contour(points, n_points),
    };
    Ok(curve)
}

fn discretize_ellipse(center: Vector2<f64>, a: f64, b: f64, tilt: f64, n: usize) -> BoundaryCurve {
    let rot = Rotation2::new(tilt);
    let dt = 2.0 * PI / n as f64;
    let point = |t: f64| center + rot * Vector2::new(a * t.cos(), b * t.sin());
    let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();

    let mut nodes = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut breakpoints = Vec::with_capacity(n);
    let circle = a == b;
    for i in 0..n {
        let t0 = i as f64 * dt;
        let t = (i as f64 + 0.5) * dt;
        breakpoints.push(point(t0));
        nodes.push(point(t));
        tangents.push(rot * Vector2::new(-a * t.sin(), b * t.cos()));
        let g = speed(t);
        curvature.push(a * b / (g * g * g));
        let w = if circle {
            a * dt
        } else {
            quadrature::adaptive(&speed, t0, t0 + dt, 1e-15 * a.max(b) * dt)
        };
        weights.push(w);
    }
    BoundaryCurve::from_panels(nodes, tangents, weights, curvature, breakpoints)
}

fn discretize_polygon(vertices: &[[f64; 2]], n: usize) -> Result<BoundaryCurve, ShapeError> {
    let mut pts = dedup_closed(vertices);
    if polygon_area(&pts) < 0.0 {
        pts.reverse();
    }
    let m = pts.len();
    if n < m {
        return Err(ShapeError::TooFewPoints { got: n, min: m });
    }
    let lengths: Vec<f64> = (0..m).map(|e| (pts[(e + 1) % m] - pts[e]).norm()).collect();
    let total: f64 = lengths.iter().sum();

    // largest-remainder allocation with at least one panel per edge
    let ideal: Vec<f64> = lengths.iter().map(|l| l / total * n as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(1)).collect();
    let mut assigned: usize = counts.iter().sum();
    while assigned > n {
        // take back from the edge that is most over-served
        let e = (0..m)
            .filter(|&e| counts[e] > 1)
            .max_by(|&p, &q| {
                (counts[p] as f64 - ideal[p]).total_cmp(&(counts[q] as f64 - ideal[q]))
            })
            .expect("n >= number of edges");
        counts[e] -= 1;
        assigned -= 1;
    }
    while assigned < n {
        let e = (0..m)
            .max_by(|&p, &q| {
                (ideal[p] - counts[p] as f64).total_cmp(&(ideal[q] - counts[q] as f64))
            })
            .expect("non-empty polygon");
        counts[e] += 1;
        assigned += 1;
    }

    let mut nodes = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut breakpoints = Vec::with_capacity(n);
    for e in 0..m {
        let start = pts[e];
        let edge = pts[(e + 1) % m] - start;
        let k = counts[e];
        for j in 0..k {
            breakpoints.push(start + edge * (j as f64 / k as f64));
            nodes.push(start + edge * ((j as f64 + 0.5) / k as f64));
            tangents.push(edge);
            weights.push(lengths[e] / k as f64);
        }
    }
    let curvature = vec![0.0; n];
    Ok(BoundaryCurve::from_panels(
        nodes,
        tangents,
        weights,
        curvature,
        breakpoints,
    ))
}

fn discretize_contour(points: &[[f64; 2]], n: usize) -> BoundaryCurve {
    let mut pts = dedup_closed(points);
    if polygon_area(&pts) < 0.0 {
        pts.reverse();
    }
    let (total, breakpoints_nodes) = {
        let samples: Vec<f64> = (0..2 * n).map(|k| k as f64 * 0.5).collect();
        let total = closed_length(&pts);
        let at = resample_closed(&pts, &samples.iter().map(|k| k * total / n as f64).collect::<Vec<_>>());
        (total, at)
    };
    let breakpoints: Vec<Vector2<f64>> = breakpoints_nodes.iter().step_by(2).copied().collect();
    let nodes: Vec<Vector2<f64>> = breakpoints_nodes.iter().skip(1).step_by(2).copied().collect();
    let h = total / n as f64;

    let mut tangents = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let prev = nodes[(i + n - 1) % n];
        let next = nodes[(i + 1) % n];
        let cur = nodes[i];
        tangents.push(next - prev);
        curvature.push(menger_curvature(prev, cur, next));
    }
    BoundaryCurve::from_panels(nodes, tangents, vec![h; n], curvature, breakpoints)
}

/// Signed curvature of the circle through three points (positive for a
/// left turn).
fn menger_curvature(p: Vector2<f64>, q: Vector2<f64>, r: Vector2<f64>) -> f64 {
    let u = q - p;
    let v = r - q;
    let w = r - p;
    let cross = u.x * v.y - u.y * v.x;
    let denom = u.norm() * v.norm() * w.norm();
    if denom == 0.0 {
        0.0
    } else {
        2.0 * cross / denom
    }
}

/// Converts to vectors and drops consecutive duplicates, including a
/// repeated closing point.
fn dedup_closed(points: &[[f64; 2]]) -> Vec<Vector2<f64>> {
    let mut out: Vec<Vector2<f64>> = Vec::with_capacity(points.len());
    for p in points {
        let v = Vector2::from(*p);
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

pub(crate) fn polygon_area(pts: &[Vector2<f64>]) -> f64 {
    let n = pts.len();
    let origin = pts[0];
    0.5 * (0..n)
        .map(|k| {
            let p = pts[k] - origin;
            let q = pts[(k + 1) % n] - origin;
            p.x * q.y - p.y * q.x
        })
        .sum::<f64>()
}

fn closed_length(pts: &[Vector2<f64>]) -> f64 {
    let n = pts.len();
    (0..n).map(|k| (pts[(k + 1) % n] - pts[k]).norm()).sum()
}

/// Points at the given (sorted, in `[0, L)`) arclength positions along the
/// closed polyline.
pub(crate) fn resample_closed(pts: &[Vector2<f64>], positions: &[f64]) -> Vec<Vector2<f64>> {
    let n = pts.len();
    let mut out = Vec::with_capacity(positions.len());
    let mut seg = 0;
    let mut seg_start = 0.0;
    let mut seg_len = (pts[1 % n] - pts[0]).norm();
    for &s in positions {
        while s > seg_start + seg_len && seg + 1 < n {
            seg_start += seg_len;
            seg += 1;
            seg_len = (pts[(seg + 1) % n] - pts[seg]).norm();
        }
        let a = pts[seg];
        let b = pts[(seg + 1) % n];
        let f = if seg_len > 0.0 {
            ((s - seg_start) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(a + (b - a) * f);
    }
    out
}

fn segments_intersect(p1: Vector2<f64>, p2: Vector2<f64>, q1: Vector2<f64>, q2: Vector2<f64>) -> bool {
    let orient = |a: Vector2<f64>, b: Vector2<f64>, c: Vector2<f64>| {
        let v = (b - a).x * (c - a).y - (b - a).y * (c - a).x;
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let on_segment = |a: Vector2<f64>, b: Vector2<f64>, c: Vector2<f64>| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

fn check_simple(pts: &[Vector2<f64>]) -> Result<(), ShapeError> {
    let n = pts.len();
    // bounding boxes prune most pairs for dense contours
    let boxes: Vec<(Vector2<f64>, Vector2<f64>)> = (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            (a.inf(&b), a.sup(&b))
        })
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (lo_i, hi_i) = boxes[i];
            let (lo_j, hi_j) = boxes[j];
            if lo_i.x > hi_j.x || lo_j.x > hi_i.x || lo_i.y > hi_j.y || lo_j.y > hi_i.y {
                continue;
            }
            if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return Err(ShapeError::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

/// Moves the curve to its centroid and shrinks it so that the perimeter is
/// at most `2 * kappa`. Curves that already comply are only recentred.
pub fn normalize(curve: &BoundaryCurve, kappa: f64) -> (BoundaryCurve, FrameTransform) {
    let limit = 2.0 * kappa;
    let scale = if curve.perimeter() <= limit * (1.0 + 1e-12) {
        1.0
    } else {
        limit / curve.perimeter()
    };
    let c = curve.centroid();
    let frame = FrameTransform {
        scale,
        shift: [c.x, c.y],
    };
    (curve.transformed(&frame), frame)
}

/// Signed enclosed area; positive for counterclockwise curves.
pub fn signed_area(curve: &BoundaryCurve) -> f64 {
    curve.area_centroid().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn disk(r: f64) -> ShapeSpec {
        ShapeSpec::disk([0.0, 0.0], r)
    }

    fn check_invariants(c: &BoundaryCurve) {
        for i in 0..c.len() {
            let t = c.tangents()[i];
            let n = c.normals()[i];
            assert!((t.norm() - 1.0).abs() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            assert!(t.dot(&n).abs() < 1e-12);
            // ν is τ turned clockwise
            assert!((t.x * n.y - t.y * n.x + 1.0).abs() < 1e-12);
        }
        assert!(signed_area(c) > 0.0);
        let sum: f64 = c.weights().iter().sum();
        assert!((sum - c.perimeter()).abs() <= 1e-12 * c.perimeter());
        assert_eq!(c.breakpoints().len(), c.len());
        // no duplicated closing node
        assert!((c.nodes()[0] - c.nodes()[c.len() - 1]).norm() > 0.0);
    }

    #[test]
    fn disk_perimeter_and_curvature() {
        let c = discretize(&disk(0.5), 256).unwrap();
        check_invariants(&c);
        assert!((c.perimeter() - PI).abs() < 1e-10);
        assert!(c.curvature().iter().all(|k| (k - 2.0).abs() < 1e-12));
        // outward normals on a centred disk point along the position
        for (x, n) in c.nodes().iter().zip(c.normals()) {
            assert!((x.normalize() - n).norm() < 1e-12);
        }
    }

    #[test]
    fn round_ellipse_equals_disk() {
        let a = discretize(&disk(0.5), 64).unwrap();
        let b = discretize(&ShapeSpec::ellipse([0.0, 0.0], 0.5, 0.5, 0.0), 64).unwrap();
        for (p, q) in a.nodes().iter().zip(b.nodes()) {
            assert!((p - q).norm() < 1e-15);
        }
    }

    fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let l = simpson(f, a, m);
            let r = simpson(f, m, b);
            if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
            }
        }
        rec(f, a, b, simpson(f, a, b), tol, depth)
    }

    #[test]
    fn thin_ellipse_perimeter_matches_adaptive_arclength() {
        let (a, b) = (0.01, 1.0);
        let c = discretize(&ShapeSpec::ellipse([0.0, 0.0], a, b, 0.0), 512).unwrap();
        check_invariants(&c);
        let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
        let oracle = adaptive_simpson(&speed, 0.0, 2.0 * PI, 1e-12, 50);
        assert!((c.perimeter() - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", c.perimeter());
    }

    #[test]
    fn perimeter_error_shrinks_with_refinement() {
        // the panel polygon perimeter approaches the exact one at second order
        let exact = PI;
        let chord_perimeter = |n: usize| {
            let c = discretize(&disk(0.5), n).unwrap();
            let bp = c.breakpoints();
            (0..n).map(|i| (bp[(i + 1) % n] - bp[i]).norm()).sum::<f64>()
        };
        let e1 = (chord_perimeter(64) - exact).abs();
        let e2 = (chord_perimeter(128) - exact).abs();
        assert!(e2 < e1 / 3.5, "{e1} {e2}");
    }

    #[test]
    fn areas() {
        let c = discretize(&disk(0.5), 256).unwrap();
        assert!((signed_area(&c) - PI / 4.0).abs() < 1e-4);
        let sq = ShapeSpec::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        };
        let c = discretize(&sq, 64).unwrap();
        check_invariants(&c);
        assert!((signed_area(&c) - 1.0).abs() < 1e-14);
        assert!((c.centroid() - Vector2::new(0.5, 0.5)).norm() < 1e-14);
        let e = discretize(&ShapeSpec::ellipse([0.0, 0.0], 0.01, 1.0, 0.0), 256).unwrap();
        let exact = PI * 0.01;
        assert!((signed_area(&e) - exact).abs() < 1e-4 * exact);
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let cw = ShapeSpec::Polygon {
            vertices: vec![[0.0, 0.0], [0.0, 1.0], [2.0, 1.0], [2.0, 0.0]],
        };
        let c = discretize(&cw, 32).unwrap();
        check_invariants(&c);
        assert!((signed_area(&c) - 2.0).abs() < 1e-14);
        assert_eq!(c.len(), 32);
    }

    #[test]
    fn rejects_bad_input() {
        let bowtie = ShapeSpec::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
        };
        assert!(matches!(discretize(&bowtie, 64), Err(ShapeError::SelfIntersecting(..))));
        assert!(matches!(discretize(&disk(1.0), 7), Err(ShapeError::TooFewPoints { .. })));
        assert!(matches!(discretize(&disk(-1.0), 64), Err(ShapeError::NonPositiveRadius(_))));
        let two = ShapeSpec::Contour {
            points: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
        };
        assert!(matches!(discretize(&two, 64), Err(ShapeError::TooFewVertices(2))));
        let line = ShapeSpec::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
        };
        assert!(discretize(&line, 64).is_err());
    }

    #[test]
    fn contour_of_dense_circle() {
        let pts: Vec<[f64; 2]> = (0..2000)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 2000.0;
                [3.0 + 2.0 * t.cos(), -1.0 + 2.0 * t.sin()]
            })
            .collect();
        let c = discretize(&ShapeSpec::Contour { points: pts }, 128).unwrap();
        check_invariants(&c);
        assert!((c.perimeter() - 4.0 * PI).abs() < 1e-4);
        assert!(c.curvature().iter().all(|k| (k - 0.5).abs() < 1e-3));
        assert!((c.centroid() - Vector2::new(3.0, -1.0)).norm() < 1e-10);
        for (x, n) in c.nodes().iter().zip(c.normals()) {
            assert!(((x - Vector2::new(3.0, -1.0)).normalize() - n).norm() < 1e-3);
        }
    }

    #[test]
    fn normalize_examples() {
        let unit = discretize(&disk(1.0), 128).unwrap();
        let (n, f) = normalize(&unit, 0.5);
        assert!((f.scale - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((n.perimeter() - 1.0).abs() < 1e-12);

        let small = discretize(&disk(0.1), 128).unwrap();
        let (_, f) = normalize(&small, 0.5);
        assert_eq!(f.scale, 1.0);
        assert!(f.shift[0].abs() < 1e-15 && f.shift[1].abs() < 1e-15);

        let off = discretize(&ShapeSpec::disk([3.0, 4.0], 0.05), 128).unwrap();
        let (n, f) = normalize(&off, 0.5);
        assert!(n.centroid().norm() < 1e-10);
        assert_eq!(f.scale, 1.0);
        assert!((Vector2::from(f.shift) - Vector2::new(3.0, 4.0)).norm() < 1e-10);
    }

    #[test]
    fn quarter_turn_covariance() {
        let c = discretize(&disk(0.4), 64).unwrap();
        let r = c.rotated(PI / 2.0);
        // a quarter turn maps the 64-node grid onto itself, shifted by 16
        for i in 0..64 {
            let j = (i + 16) % 64;
            assert!((r.nodes()[i] - c.nodes()[j]).norm() < 1e-14);
            assert!((r.normals()[i] - c.normals()[j]).norm() < 1e-14);
            assert!((r.tangents()[i] - c.tangents()[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn shape_json_round_trip() {
        let s: ShapeSpec = serde_json::from_str(r#"{"type":"disk","center":[1,2],"radius":0.5}"#).unwrap();
        assert_eq!(s, ShapeSpec::disk([1.0, 2.0], 0.5));
        let e: ShapeSpec =
            serde_json::from_str(r#"{"type":"ellipse","center":[0,0],"a":1,"b":2}"#).unwrap();
        assert_eq!(e, ShapeSpec::ellipse([0.0, 0.0], 1.0, 2.0, 0.0));
        let c: ShapeSpec = serde_json::from_str(r#"{"type":"contour","points":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(c.kind(), "contour");
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(a in 0.05f64..3.0, b in 0.05f64..3.0, tilt in 0.0f64..3.0,
                                   cx in -5.0f64..5.0, cy in -5.0f64..5.0, kappa in 0.1f64..0.9) {
            let c = discretize(&ShapeSpec::ellipse([cx, cy], a, b, tilt), 64).unwrap();
            let (n1, _) = normalize(&c, kappa);
            prop_assert!(n1.perimeter() <= 2.0 * kappa * (1.0 + 1e-12));
            prop_assert!(n1.centroid().norm() < 1e-10 * (1.0 + cx.abs() + cy.abs()));
            let (n2, f2) = normalize(&n1, kappa);
            prop_assert_eq!(f2.scale, 1.0);
            for (p, q) in n1.nodes().iter().zip(n2.nodes()) {
                prop_assert!((p - q).norm() < 1e-10);
            }
        }

        #[test]
        fn analytic_curves_satisfy_invariants(a in 0.01f64..2.0, b in 0.01f64..2.0, tilt in -3.0f64..3.0, n in 8usize..200) {
            let c = discretize(&ShapeSpec::ellipse([0.3, -0.2], a, b, tilt), n).unwrap();
            check_invariants(&c);
        }
    }
}
