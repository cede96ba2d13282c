//! Reservoir volume modeling toolkit.
//!
//! Implements a full batch pipeline for estimating stored dam volume from
//! surface observations: CSV ingestion with sentinel removal, IQR outlier
//! filtering, staged feature renditions, regularized linear models fit by
//! cyclic coordinate descent, CART random forests, stage/volume rating
//! curves, and a threshold-routed blend of a low-volume linear model with a
//! high-volume forest.
//!
//! Modules mirror the pipeline stages:
//!
//! - [`ingest`] — CSV parsing, sentinel removal, chronological splitting
//! - [`preprocess`] — quantiles, IQR filtering, feature standardization
//! - [`features`] — the four nested feature renditions
//! - [`linmod`] — OLS, Ridge, Lasso, ElasticNet with CV penalty selection
//! - [`forest`] — CART regression trees and bootstrap-aggregated forests
//! - [`ratingcurve`] — monotone piecewise-linear stage↔volume curves
//! - [`blend`] — threshold-routed low/high model blending and sweeps
//! - [`metrics`] — RMSE, R², residual bins, comparison reports
//! - [`artifact`] — versioned JSON model artifacts
//! - [`synth`] — pinned synthetic reservoir dataset for tests and demos

pub mod artifact;
pub mod blend;
pub mod error;
pub mod features;
pub mod forest;
pub mod ingest;
pub mod linmod;
pub mod metrics;
pub mod preprocess;
pub mod ratingcurve;
pub mod synth;

pub use error::{Error, Result};
