//! Frame-level detection metrics: IoU, greedy score-ordered matching,
//! precision/recall curves, interpolated AP and mAP.

mod curve;
mod evaluate;
mod iou;
mod matching;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ava_data::ActionId;
use crate::scalar::Scalar;

pub use curve::{average_precision, pr_curve, PRCurve, PrPoint};
pub use evaluate::{evaluate, evaluate_with_threads, ApResult, EvaluationReport, Totals};
pub use iou::iou;
pub use matching::{match_class, LabeledDetection};

/// How the precision envelope is integrated into AP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Area under the envelope at every recall step.
    #[default]
    AllPoint,
    /// Mean envelope precision at recall 0.0, 0.1, ..., 1.0.
    ElevenPoint,
}

impl Interpolation {
    pub fn as_str(self) -> &'static str {
        match self {
            Interpolation::AllPoint => "all_point",
            Interpolation::ElevenPoint => "eleven_point",
        }
    }
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interpolation {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all_point" => Ok(Interpolation::AllPoint),
            "eleven_point" => Ok(Interpolation::ElevenPoint),
            other => Err(MetricsError::UnknownInterpolation(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("iou threshold must lie in (0, 1]")]
    InvalidIouThreshold,
    #[error("score floor must lie in [0, 1]")]
    InvalidScoreFloor,
    #[error("unknown interpolation mode {0:?} (expected all_point or eleven_point)")]
    UnknownInterpolation(String),
    #[error("a precision/recall curve needs at least one ground-truth box")]
    NoGroundTruth,
    #[error("detections of action {expected} mixed with action {found}")]
    MixedClasses { expected: ActionId, found: ActionId },
    #[error("action id {0} is not in the vocabulary")]
    UnknownAction(ActionId),
    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

/// Evaluation protocol settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig<T = f64> {
    iou_threshold: T,
    interpolation: Interpolation,
    score_floor: T,
    retain_curves: bool,
}

impl<T: Scalar> EvalConfig<T> {
    pub fn new(
        iou_threshold: T,
        interpolation: Interpolation,
        score_floor: T,
    ) -> Result<Self, MetricsError> {
        if !(iou_threshold > T::zero() && iou_threshold <= T::one()) {
            return Err(MetricsError::InvalidIouThreshold);
        }
        if !score_floor.is_unit_interval() {
            return Err(MetricsError::InvalidScoreFloor);
        }
        Ok(Self {
            iou_threshold,
            interpolation,
            score_floor,
            retain_curves: false,
        })
    }

    /// Keep every class's PR curve in the report.
    pub fn with_curves(mut self, retain: bool) -> Self {
        self.retain_curves = retain;
        self
    }

    pub fn iou_threshold(&self) -> T {
        self.iou_threshold
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn score_floor(&self) -> T {
        self.score_floor
    }

    pub fn retain_curves(&self) -> bool {
        self.retain_curves
    }
}

impl<T: Scalar> Default for EvalConfig<T> {
    /// IoU 0.5, all-point interpolation, no score floor.
    fn default() -> Self {
        let half = T::one() / (T::one() + T::one());
        Self::new(half, Interpolation::AllPoint, T::zero()).expect("defaults are valid")
    }
}
