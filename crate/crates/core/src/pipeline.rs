//! End-to-end computation shared by the CLI and the HTTP service.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly;
use crate::curve::{self, ShapeSpec, DEFAULT_KAPPA};
use crate::error::{ComputeError, OracleError};
use crate::gpt::{self, ContractedGPT};
use crate::oracle::{self, ErrorReport};
use crate::solve;

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeRequest {
    pub shape: ShapeSpec,
    pub contrast: f64,
    pub order: usize,
    pub points: usize,
    /// Number of harmonic polynomial pairs `N1 = N2`.
    pub basis_count: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl ComputeRequest {
    pub fn new(shape: ShapeSpec, contrast: f64, order: usize, points: usize, basis_count: usize) -> Self {
        ComputeRequest {
            shape,
            contrast,
            order,
            points,
            basis_count,
            kappa: DEFAULT_KAPPA,
        }
    }

    /// Checks the request and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, ComputeError> {
        let bad = |m: String| Err(ComputeError::InvalidRequest(m));
        if !(self.contrast > 0.0 && self.contrast.is_finite()) {
            return bad(format!("contrast must be positive and finite, got {}", self.contrast));
        }
        if self.order == 0 {
            return bad("order must be at least 1".into());
        }
        if self.basis_count < self.order {
            return bad(format!(
                "basis_count {} is below the tensor order {}: the representation cannot resolve the tensor",
                self.basis_count, self.order
            ));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return bad(format!("kappa must lie in (0, 1), got {}", self.kappa));
        }
        if self.points < curve::MIN_POINTS {
            return bad(format!("at least {} points are required, got {}", curve::MIN_POINTS, self.points));
        }
        self.shape.validate()?;
        let mut warnings = Vec::new();
        if self.basis_count == self.order {
            warnings.push(format!(
                "basis_count equals the order ({}); at least {} pairs are recommended",
                self.order,
                self.order + 1
            ));
        }
        Ok(warnings)
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub discretize: f64,
    pub assemble: f64,
    pub solve: f64,
    pub extract: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct ComputeOutcome {
    pub request: ComputeRequest,
    /// Normalization scale used during the solve.
    pub scale: f64,
    /// Flux-formula tensor in the original frame.
    pub tensor: ContractedGPT,
    /// Trace-formula tensor in the original frame.
    pub trace_tensor: ContractedGPT,
    pub exact: Option<ContractedGPT>,
    pub error_report: Option<ErrorReport>,
    pub cond_estimate: f64,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl ComputeOutcome {
    /// `max |flux - trace| / max |flux|`.
    pub fn consistency(&self) -> f64 {
        let scale = self.tensor.entries.amax();
        let diff = (&self.tensor.entries - &self.trace_tensor.entries).amax();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    pub fn document(&self) -> ComputeDocument {
        let meta = |g: &ContractedGPT| TensorDocument::new(g, self.scale, &self.request);
        ComputeDocument {
            version: crate::VERSION.to_string(),
            request: self.request.clone(),
            tensor: meta(&self.tensor),
            trace_tensor: meta(&self.trace_tensor),
            consistency: self.consistency(),
            asymmetry: self.tensor.asymmetry(),
            exact: self.exact.as_ref().map(meta),
            error_report: self.error_report.clone(),
            cond_estimate: self.cond_estimate,
            warnings: self.warnings.clone(),
            timings: self.timings.clone(),
        }
    }
}

/// Serialized tensor with its metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorDocument {
    pub order: usize,
    pub contrast: f64,
    pub scale: f64,
    pub center: [f64; 2],
    pub points: usize,
    pub basis_count: usize,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl TensorDocument {
    pub fn new(g: &ContractedGPT, scale: f64, req: &ComputeRequest) -> Self {
        TensorDocument {
            order: g.order,
            contrast: g.contrast,
            scale,
            center: g.frame.shift,
            points: req.points,
            basis_count: req.basis_count,
            labels: g.labels(),
            entries: g.rows(),
        }
    }
}

/// Response of a compute request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeDocument {
    pub version: String,
    pub request: ComputeRequest,
    pub tensor: TensorDocument,
    pub trace_tensor: TensorDocument,
    pub consistency: f64,
    pub asymmetry: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<TensorDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_report: Option<ErrorReport>,
    pub cond_estimate: f64,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

/// Analytic tensor for disks and ellipses, `None` for other shapes.
pub fn exact_tensor(shape: &ShapeSpec, contrast: f64, order: usize) -> Option<Result<ContractedGPT, OracleError>> {
    match shape {
        ShapeSpec::Disk { center, radius } => {
            Some(oracle::exact_disk_gpt(*radius, contrast, order).map(|g| oracle::centred(g, *center)))
        }
        ShapeSpec::Ellipse { center, a, b, tilt } => {
            Some(oracle::exact_ellipse_gpt(*a, *b, *tilt, contrast, order).map(|g| oracle::centred(g, *center)))
        }
        _ => None,
    }
}

/// discretize → normalize → assemble → solve → extract → unscale.
pub fn compute(req: &ComputeRequest) -> Result<ComputeOutcome, ComputeError> {
    let mut warnings = req.validate()?;
    let start = Instant::now();
    let mut timings = Timings::default();

    let t = Instant::now();
    let raw = curve::discretize(&req.shape, req.points)?;
    let (normalized, frame) = curve::normalize(&raw, req.kappa);
    timings.discretize = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let n = req.basis_count;
    let sys = assembly::assemble(&normalized, frame, n, n, req.contrast)?;
    timings.assemble = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let sol = solve::solve_system(&sys)?;
    timings.solve = t.elapsed().as_secs_f64();
    if sol.cond_estimate > 1e8 {
        warnings.push(format!(
            "condition estimate {:.3e}: the result may be unreliable; increase the point count",
            sol.cond_estimate
        ));
    }

    let t = Instant::now();
    let flux = gpt::extract_flux(&sol, &normalized, req.contrast, req.order, frame)?;
    let trace = gpt::extract_trace(&sol, &normalized, req.contrast, req.order, frame)?;
    let tensor = gpt::unscale(&flux);
    let trace_tensor = gpt::unscale(&trace);
    timings.extract = t.elapsed().as_secs_f64();

    let exact = exact_tensor(&req.shape, req.contrast, req.order).transpose()?;
    let error_report = match &exact {
        Some(e) => match oracle::relative_error(&tensor, e) {
            Ok(r) => Some(r),
            Err(OracleError::ZeroReference) => {
                warnings.push("reference tensor is zero (contrast 1); no error report".into());
                None
            }
            Err(err) => return Err(err.into()),
        },
        None => None,
    };
    timings.total = start.elapsed().as_secs_f64();

    Ok(ComputeOutcome {
        request: req.clone(),
        scale: frame.scale,
        tensor,
        trace_tensor,
        exact,
        error_report,
        cond_estimate: sol.cond_estimate,
        warnings,
        timings,
    })
}

/// Error body shared by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDocument {
    pub version: String,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cond_estimate: Option<f64>,
}

impl ErrorDocument {
    pub fn new(code: &str, message: String, cond_estimate: Option<f64>) -> Self {
        ErrorDocument {
            version: crate::VERSION.to_string(),
            error: ErrorBody {
                code: code.to_string(),
                message,
                cond_estimate,
            },
        }
    }
}

impl From<&ComputeError> for ErrorDocument {
    fn from(e: &ComputeError) -> Self {
        ErrorDocument::new(e.code(), e.to_string(), e.cond_estimate())
    }
}
