//! Complexity factors, dataset ablations and segmentation metrics for
//! multi-object segmentation datasets.

pub mod ablation;
pub mod assignment;
pub mod dataset;
pub mod error;
pub mod factors;
pub mod filters;
pub mod image;
pub mod maskgeo;
pub mod metrics;
pub mod report;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};
