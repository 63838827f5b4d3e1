//! Contracted generalized polarization tensors (GPTs) of planar conductivity
//! inclusions.
//!
//! The pipeline is: [`curve::discretize`] the shape, [`curve::normalize`] it
//! so the perimeter is below `2κ`, [`assembly::assemble`] the weak
//! boundary-integral Galerkin system over harmonic polynomials,
//! [`solve::solve_system`] it, then [`gpt::extract_flux`] /
//! [`gpt::extract_trace`] and [`gpt::unscale`] the tensor back to the
//! original frame. [`pipeline::compute`] runs all of it.

pub mod assembly;
pub mod basis;
pub mod bench;
pub mod curve;
pub mod error;
pub mod gpt;
pub mod ingest;
pub mod kernel;
pub mod oracle;
pub mod pipeline;
pub mod quadrature;
pub mod solve;

pub use curve::{BoundaryCurve, FrameTransform, ShapeSpec};
pub use error::ComputeError;
pub use gpt::ContractedGPT;
pub use pipeline::{compute, ComputeRequest};

/// Version string reported in every document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
