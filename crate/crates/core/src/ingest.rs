//! Bitmap import: threshold, clean up, trace and smooth the boundary of a
//! filled dark shape on a light background.
//!
//! Pixel `(col, row)` has its centre at `(col + 0.5, height - row - 0.5)`, so
//! the y axis points up and the traced curve lives in pixel units.

use std::collections::{HashMap, VecDeque};

use nalgebra::Vector2;
use serde::Serialize;

use crate::curve::{self, BoundaryCurve, ShapeSpec};
use crate::error::IngestError;

/// Pixels darker than this luminance (in `[0, 1]`) belong to the shape.
pub const THRESHOLD: f32 = 0.5;

/// Decoders compiled in.
pub const SUPPORTED_FORMATS: &[&str] = &["png", "pbm/pgm/ppm/pam", "bmp"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    /// Row-major, `true` inside the shape.
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Thresholds a row-major luminance buffer without any cleanup.
    pub fn threshold(width: usize, height: usize, luma: &[f32]) -> Self {
        BinaryMask {
            width,
            height,
            bits: luma.iter().map(|v| *v < THRESHOLD).collect(),
        }
    }

    fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (c, r) = (idx % self.width, idx / self.width);
        let w = self.width;
        [
            (c > 0).then(|| idx - 1),
            (c + 1 < w).then(|| idx + 1),
            (r > 0).then(|| idx - w),
            (r + 1 < self.height).then(|| idx + w),
        ]
        .into_iter()
        .flatten()
    }

    /// Labels 4-connected regions where `bits == value`, optionally only
    /// those reachable from `seeds`.
    fn flood(&self, value: bool, seeds: &[usize], label: &mut [usize], id: usize) -> usize {
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut count = 0;
        for &s in seeds {
            if self.bits[s] == value && label[s] == 0 {
                label[s] = id;
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            count += 1;
            for j in self.neighbours(i) {
                if self.bits[j] == value && label[j] == 0 {
                    label[j] = id;
                    queue.push_back(j);
                }
            }
        }
        count
    }

    /// Keeps the largest 4-connected component and fills its holes. Returns
    /// the number of dropped components.
    pub fn clean(&mut self) -> Result<usize, IngestError> {
        let n = self.bits.len();
        let mut label = vec![0usize; n];
        let mut best = (0usize, 0usize);
        let mut components = 0;
        for i in 0..n {
            if self.bits[i] && label[i] == 0 {
                components += 1;
                let size = self.flood(true, &[i], &mut label, components);
                if size > best.1 {
                    best = (components, size);
                }
            }
        }
        if components == 0 {
            return Err(IngestError::EmptyShape);
        }
        for (bit, &l) in self.bits.iter_mut().zip(&label) {
            *bit = l == best.0;
        }

        let border: Vec<usize> = (0..n)
            .filter(|&i| {
                let (c, r) = (i % self.width, i / self.width);
                c == 0 || r == 0 || c + 1 == self.width || r + 1 == self.height
            })
            .collect();
        if border.iter().any(|&i| self.bits[i]) {
            return Err(IngestError::TouchesBorder);
        }
        let mut outside = vec![0usize; n];
        self.flood(false, &border, &mut outside, 1);
        for (bit, &o) in self.bits.iter_mut().zip(&outside) {
            if o == 0 {
                *bit = true;
            }
        }
        Ok(components - 1)
    }

    /// The same mask surrounded by `pad` background pixels.
    pub fn padded(&self, pad: usize) -> Self {
        let (w, h) = (self.width + 2 * pad, self.height + 2 * pad);
        let mut bits = vec![false; w * h];
        for r in 0..self.height {
            for c in 0..self.width {
                bits[(r + pad) * w + c + pad] = self.get(c, r);
            }
        }
        BinaryMask {
            width: w,
            height: h,
            bits,
        }
    }
}

/// Decodes an image and returns the cleaned mask plus warnings.
pub fn load_mask(bytes: &[u8]) -> Result<(BinaryMask, Vec<String>), IngestError> {
    let img = image::load_from_memory(bytes).map_err(|e| IngestError::Decode(e.to_string()))?;
    let luma = img.to_luma32f();
    let (w, h) = (luma.width() as usize, luma.height() as usize);
    let mut mask = BinaryMask::threshold(w, h, luma.as_raw());
    let dropped = mask.clean()?;
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(format!(
            "image contains {} shapes; kept the largest and dropped {dropped}",
            dropped + 1
        ));
    }
    Ok((mask, warnings))
}

/// Edge of the pixel-centre lattice crossed by the contour: horizontal
/// edges join `(c, r)`–`(c+1, r)`, vertical ones `(c, r)`–`(c, r+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

impl Edge {
    fn point(self, height: usize) -> Vector2<f64> {
        let h = height as f64;
        match self {
            Edge::H(c, r) => Vector2::new(c as f64 + 1.0, h - r as f64 - 0.5),
            Edge::V(c, r) => Vector2::new(c as f64 + 0.5, h - r as f64 - 1.0),
        }
    }
}

/// Closed loops of the 0.5 level set of the mask (marching squares with
/// linear interpolation between pixel centres). Diagonal-only contacts are
/// kept apart, matching 4-connectivity.
fn marching_squares(mask: &BinaryMask) -> Vec<Vec<Vector2<f64>>> {
    let mut links: HashMap<Edge, Vec<Edge>> = HashMap::new();
    let mut connect = |a: Edge, b: Edge| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for r in 0..mask.height.saturating_sub(1) {
        for c in 0..mask.width.saturating_sub(1) {
            let tl = mask.get(c, r);
            let tr = mask.get(c + 1, r);
            let bl = mask.get(c, r + 1);
            let br = mask.get(c + 1, r + 1);
            let top = Edge::H(c, r);
            let bottom = Edge::H(c, r + 1);
            let left = Edge::V(c, r);
            let right = Edge::V(c + 1, r);
            let mut crossed = Vec::with_capacity(4);
            if tl != tr {
                crossed.push(top);
            }
            if tr != br {
                crossed.push(right);
            }
            if br != bl {
                crossed.push(bottom);
            }
            if bl != tl {
                crossed.push(left);
            }
            match crossed.len() {
                2 => connect(crossed[0], crossed[1]),
                4 if tl => {
                    connect(top, left);
                    connect(bottom, right);
                }
                4 => {
                    connect(top, right);
                    connect(bottom, left);
                }
                _ => {}
            }
        }
    }

    let mut seen: HashMap<Edge, bool> = HashMap::new();
    let mut keys: Vec<Edge> = links.keys().copied().collect();
    keys.sort_by_key(|e| match *e {
        Edge::H(c, r) => (r, c, 0),
        Edge::V(c, r) => (r, c, 1),
    });
    let mut loops = Vec::new();
    for start in keys {
        if seen.contains_key(&start) {
            continue;
        }
        let mut lp = vec![start.point(mask.height)];
        seen.insert(start, true);
        let mut prev = start;
        let mut cur = links[&start][0];
        while cur != start {
            seen.insert(cur, true);
            lp.push(cur.point(mask.height));
            let next = links[&cur].iter().copied().find(|e| *e != prev).unwrap_or(prev);
            prev = cur;
            cur = next;
        }
        loops.push(lp);
    }
    loops
}

/// Window of the periodic moving average for `n` points.
pub fn smoothing_window(n: usize) -> usize {
    let w = (n / 128).max(3);
    if w.is_multiple_of(2) {
        w + 1
    } else {
        w
    }
}

/// Counterclockwise contour of the mask resampled to `n_points` equally
/// spaced points and smoothed by a periodic moving average.
pub fn trace_contour_points(mask: &BinaryMask, n_points: usize) -> Result<Vec<[f64; 2]>, IngestError> {
    if n_points < curve::MIN_POINTS {
        return Err(crate::error::ShapeError::TooFewPoints {
            got: n_points,
            min: curve::MIN_POINTS,
        }
        .into());
    }
    let mut raw = marching_squares(mask)
        .into_iter()
        .max_by_key(|l| l.len())
        .ok_or(IngestError::Degenerate)?;
    if raw.len() < 4 {
        return Err(IngestError::Degenerate);
    }
    if curve::polygon_area(&raw) < 0.0 {
        raw.reverse();
    }
    let total: f64 = (0..raw.len()).map(|i| (raw[(i + 1) % raw.len()] - raw[i]).norm()).sum();
    let positions: Vec<f64> = (0..n_points).map(|i| i as f64 * total / n_points as f64).collect();
    let pts = curve::resample_closed(&raw, &positions);

    let w = smoothing_window(n_points);
    let half = (w / 2) as isize;
    let n = n_points as isize;
    let smooth: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let s = (-half..=half).fold(Vector2::zeros(), |acc, d| acc + pts[((i + d).rem_euclid(n)) as usize]);
            let p = s / w as f64;
            [p.x, p.y]
        })
        .collect();
    let area = curve::polygon_area(&smooth.iter().map(|p| Vector2::from(*p)).collect::<Vec<_>>());
    if area.abs() < 1.0 {
        return Err(IngestError::Degenerate);
    }
    Ok(smooth)
}

/// Traced and discretized boundary of the mask.
pub fn trace_contour(mask: &BinaryMask, n_points: usize) -> Result<BoundaryCurve, IngestError> {
    let points = trace_contour_points(mask, n_points)?;
    Ok(curve::discretize(&ShapeSpec::Contour { points }, n_points)?)
}

/// Result of importing an image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportResult {
    pub shape: ShapeSpec,
    /// The contour as an open polyline (first point not repeated).
    pub preview: Vec<[f64; 2]>,
    pub centroid: [f64; 2],
    pub area: f64,
    pub width: usize,
    pub height: usize,
    pub warnings: Vec<String>,
}

impl ImportResult {
    /// Radius of the disk with the same area.
    pub fn equivalent_radius(&self) -> f64 {
        (self.area / std::f64::consts::PI).sqrt()
    }
}

/// Decodes, cleans and traces an image into a contour shape with
/// `n_points` points.
pub fn import_image(bytes: &[u8], n_points: usize) -> Result<ImportResult, IngestError> {
    let (mask, warnings) = load_mask(bytes)?;
    import_mask(&mask, n_points, warnings)
}

pub fn import_mask(mask: &BinaryMask, n_points: usize, warnings: Vec<String>) -> Result<ImportResult, IngestError> {
    let points = trace_contour_points(mask, n_points)?;
    let shape = ShapeSpec::Contour { points: points.clone() };
    shape.validate()?;
    let c = curve::discretize(&shape, n_points)?;
    let (area, centroid) = c.area_centroid();
    Ok(ImportResult {
        shape,
        preview: points,
        centroid: [centroid.x, centroid.y],
        area,
        width: mask.width,
        height: mask.height,
        warnings,
    })
}
