use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("basis indices start at 1")]
    ZeroIndex,
    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("semi-axes must be positive, got a = {a}, b = {b}")]
    NonPositiveAxes { a: f64, b: f64 },
    #[error("a closed shape needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("shape has zero area")]
    Degenerate,
    #[error("non-finite coordinate in shape description")]
    NonFinite,
    #[error("at least {min} boundary points are required, got {got}")]
    TooFewPoints { got: usize, min: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("kernel evaluated at coincident points; use the diagonal rule")]
pub struct SingularPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("curve perimeter {perimeter} is not below 2; normalize the curve first")]
    NotNormalized { perimeter: f64 },
    #[error("basis pair counts must be positive (n1 = {n1}, n2 = {n2})")]
    EmptyBasis { n1: usize, n2: usize },
    #[error("contrast must be positive and finite, got {0}")]
    InvalidContrast(f64),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Galerkin matrix is numerically singular (condition estimate {cond_estimate:.3e})")]
    IllConditioned { cond_estimate: f64 },
    #[error("solve residual {residual:.3e} exceeds the bound for condition estimate {cond_estimate:.3e}")]
    Residual { residual: f64, cond_estimate: f64 },
}

impl SolveError {
    pub fn cond_estimate(&self) -> f64 {
        match self {
            SolveError::IllConditioned { cond_estimate }
            | SolveError::Residual { cond_estimate, .. } => *cond_estimate,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GptError {
    #[error("tensor order {order} exceeds the representation size min(N1, N2) = {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("tensor order must be at least 1")]
    ZeroOrder,
    #[error("far-field point ({x}, {y}) lies inside the bounding circle of radius {radius}")]
    InsideSupport { x: f64, y: f64, radius: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("radius and contrast must be positive")]
    InvalidParameters,
    #[error("ellipse aspect ratio {ratio:.3e} is beyond the stable range of the series oracle")]
    UnstableSeries { ratio: f64 },
    #[error("tensor dimensions differ: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("relative error is undefined against a zero reference tensor")]
    ZeroReference,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("could not decode image: {0}")]
    Decode(String),
    #[error("empty shape: no pixel darker than mid-gray")]
    EmptyShape,
    #[error("shape touches the image border")]
    TouchesBorder,
    #[error("shape is too thin to trace a closed contour")]
    Degenerate,
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Any failure of the full compute pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComputeError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Gpt(#[from] GptError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

impl ComputeError {
    /// Machine-readable error code used by the CLI and the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            ComputeError::InvalidRequest(_) => "invalid_request",
            ComputeError::Shape(_) => "invalid_shape",
            ComputeError::Assembly(_) => "assembly_failed",
            ComputeError::Solve(SolveError::IllConditioned { .. }) => "ill_conditioned",
            ComputeError::Solve(SolveError::Residual { .. }) => "inaccurate_solve",
            ComputeError::Gpt(_) => "invalid_order",
            ComputeError::Oracle(_) => "oracle_failed",
            ComputeError::Ingest(_) => "import_failed",
        }
    }

    pub fn cond_estimate(&self) -> Option<f64> {
        match self {
            ComputeError::Solve(e) => Some(e.cond_estimate()),
            _ => None,
        }
    }
}
