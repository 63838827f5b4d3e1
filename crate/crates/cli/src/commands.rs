//! Implementations of the `compute`, `benchmark` and `import` subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polarization_core::bench::{self, BenchRow, Suite};
use polarization_core::ingest::{self, ImportResult};
use polarization_core::pipeline::{ComputeDocument, ErrorDocument};
use polarization_core::{compute, ComputeError, ComputeRequest, ShapeSpec};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parameters shared by shape selection on the command line.
#[derive(Debug, Clone, clap::Args)]
pub struct ShapeArgs {
    /// `disk`, `ellipse`, a JSON shape file, or an image to trace
    #[arg(long, default_value = "disk")]
    pub shape: String,
    /// Disk radius
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    /// Ellipse semi-axis along x (before tilt)
    #[arg(long, default_value_t = 0.01)]
    pub a: f64,
    /// Ellipse semi-axis along y (before tilt)
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Ellipse rotation in radians, counterclockwise
    #[arg(long, default_value_t = 0.0)]
    pub tilt: f64,
    /// Centre of a disk or ellipse, as `x,y`
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    pub center: [f64; 2],
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    Ok([x, y])
}

/// Reads a JSON shape: either a bare shape object or an import result with
/// a `shape` field.
pub fn parse_shape_json(text: &str) -> Result<ShapeSpec> {
    if let Ok(shape) = serde_json::from_str::<ShapeSpec>(text) {
        return Ok(shape);
    }
    #[derive(serde::Deserialize)]
    struct Wrapped {
        shape: ShapeSpec,
    }
    let w: Wrapped = serde_json::from_str(text).context("not a shape description")?;
    Ok(w.shape)
}

impl ShapeArgs {
    /// Resolves the shape, tracing images with `points` points.
    pub fn resolve(&self, points: usize) -> Result<(ShapeSpec, Vec<String>)> {
        match self.shape.as_str() {
            "disk" => Ok((ShapeSpec::disk(self.center, self.radius), vec![])),
            "ellipse" => Ok((ShapeSpec::ellipse(self.center, self.a, self.b, self.tilt), vec![])),
            path => {
                let path = Path::new(path);
                let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
                if is_json {
                    let text = String::from_utf8(bytes).context("shape file is not UTF-8")?;
                    Ok((parse_shape_json(&text)?, vec![]))
                } else {
                    let imp = ingest::import_image(&bytes, points).map_err(ComputeError::from)?;
                    Ok((imp.shape, imp.warnings))
                }
            }
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Conductivity contrast k
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub contrast: f64,
    /// Tensor order n
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Boundary points
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    /// Harmonic polynomial pairs used for the boundary unknowns
    #[arg(long = "basis-pairs", default_value_t = 5)]
    pub basis_pairs: usize,
    /// Perimeter target of the normalized curve is 2κ
    #[arg(long, default_value_t = polarization_core::curve::DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Failure of a subcommand with a structured body for stdout.
#[derive(Debug)]
pub struct CommandError {
    pub document: ErrorDocument,
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.document.error.code, self.document.error.message)
    }
}

impl std::error::Error for CommandError {}

impl From<&ComputeError> for CommandError {
    fn from(e: &ComputeError) -> Self {
        CommandError {
            document: ErrorDocument::from(e),
        }
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Runs a compute request; the document is the same one the service sends.
pub fn run_compute(args: &ComputeArgs) -> Result<ComputeDocument> {
    let (shape, import_warnings) = args.shape.resolve(args.points)?;
    let req = ComputeRequest {
        shape,
        contrast: args.contrast,
        order: args.order,
        points: args.points,
        basis_count: args.basis_pairs,
        kappa: args.kappa,
    };
    let outcome = compute(&req).map_err(|e| CommandError::from(&e))?;
    let mut doc = outcome.document();
    doc.warnings.splice(0..0, import_warnings);
    Ok(doc)
}

/// Tensor as CSV: a header of basis labels, one row per label.
pub fn tensor_csv(doc: &ComputeDocument) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row".to_string()];
    header.extend(doc.tensor.labels.iter().cloned());
    w.write_record(&header)?;
    for (label, row) in doc.tensor.labels.iter().zip(&doc.tensor.entries) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn run_benchmark(suite: Suite) -> Vec<BenchRow> {
    bench::run_suite(suite)
}

pub fn run_import(path: &Path, points: usize) -> Result<ImportResult> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    match ingest::import_image(&bytes, points) {
        Ok(r) => Ok(r),
        Err(e) => bail!(CommandError::from(&ComputeError::from(e))),
    }
}
