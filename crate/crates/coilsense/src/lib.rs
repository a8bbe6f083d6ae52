//! Soft-sensor quality control for strip-steel production.
//!
//! A multi-frequency electromagnetic sensor measures every meter of strip
//! entering a stamping line and yields a 20-dimensional reading (10 amplitude
//! gains, 10 phase shifts). This crate turns those streams into estimates of
//! two destructive-test material properties (yield strength `t1`, tensile
//! strength `t2`), classifies material as out of specification against upper
//! specification limits, and scores coil-level fault risk.
//!
//! The pieces, bottom to top:
//!
//! * [`data`] — domain types, CSV ingestion, stream cleaning, and aggregation
//!   of measurements into a labeled regression dataset.
//! * [`preprocess`] — percentile-based reference normalization,
//!   standardization, moving averages and per-variable noise ranking.
//! * [`models`] — PCA, PLS regression (NIPALS), per-variable OLS baselines.
//! * [`evaluation`] — leave-one-coil-out cross-validation, RMSE, component
//!   selection and classification metrics (precision/recall/F-beta, ROC AUC).
//! * [`fault`] — out-of-spec rules, coil risk fractions, streaming estimation
//!   with hysteresis alerting, and linkage of logged production faults.
//! * [`gmlvq`] — matrix-relevance LVQ classifier and the repeated-random-split
//!   AUC experiment.
//! * [`synthgen`] — seeded synthetic production-line generator with ground
//!   truth, used for end-to-end validation of everything above.

pub mod data;
pub mod error;
pub mod evaluation;
pub mod fault;
pub mod gmlvq;
mod linalg;
pub mod models;
pub mod preprocess;
pub mod synthgen;

pub use error::{Error, Result};
