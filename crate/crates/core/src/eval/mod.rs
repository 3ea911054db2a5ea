//! Classification scoring and the dimensionality sweep.

mod scoring;
mod sweep;

use thiserror::Error;

pub use scoring::{accuracy, precision_recall_fbeta, ConfusionMatrix, LabelScores};
pub use sweep::{
    run_sweep, CorpusSummary, Provenance, SpaceRecord, SweepReport, SweepRow, SweepSpec,
    DEFAULT_DIMS, REPORT_HEADER,
};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{predictions} predictions but {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("label {0:?} is not in the label set")]
    UnknownLabel(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
}
