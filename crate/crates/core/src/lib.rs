//! Composite-indicator construction and robustness analysis for
//! jurisdiction-by-category score matrices, with the Sentience Readiness
//! Index 2025 snapshot bundled as the reference dataset.

pub mod aggregate;
pub mod error;
pub mod groups;
pub mod inference;
pub mod io;
pub mod model;
pub mod multivariate;
pub mod robustness;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
