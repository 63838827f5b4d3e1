//! Command-line front end and HTTP service for `polarization-core`.

pub mod commands;
pub mod service;
