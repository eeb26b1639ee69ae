//! Evaluation toolkit for zero-shot action detection on AVA-style data.
//!
//! A visual question answering model is asked one yes/no question per
//! action class at every 1 Hz keyframe; its affirmative answers, with their
//! confidences and grounded boxes, become detections. This crate covers
//! everything around the model:
//!
//! - [`ava_data`]: vocabulary, ground-truth and detection CSVs, streaming
//!   parsers and the keyframe index;
//! - [`metrics`]: IoU, greedy matching, PR curves, AP and mAP;
//! - [`prompt_schedule`]: the per-class question bank and keyframe schedule;
//! - [`report`]: ranked best/worst tables and report rendering.
//!
//! Geometry and metrics are generic over [`Scalar`]; the aliases below fix
//! the common choices.

pub mod ava_data;
pub mod metrics;
pub mod prompt_schedule;
pub mod report;
mod scalar;

pub use num_rational::Ratio;
pub use scalar::Scalar;

/// How parsers and builders treat invalid input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Abort at the first invalid item with a located error.
    Strict,
    /// Count and skip invalid items.
    #[default]
    Lenient,
}

/// Exact rational scalar, for oracle runs free of rounding.
pub type Exact = Ratio<i128>;

pub type BoundingBox = ava_data::BoundingBox<f64>;
pub type GroundTruthRecord = ava_data::GroundTruthRecord<f64>;
pub type DetectionRecord = ava_data::DetectionRecord<f64>;
pub type EvalIndex = ava_data::EvalIndex<f64>;
pub type EvalConfig = metrics::EvalConfig<f64>;
pub type PRCurve = metrics::PRCurve<f64>;
pub type EvaluationReport = metrics::EvaluationReport<f64>;

pub type ExactBox = ava_data::BoundingBox<Exact>;
pub type ExactReport = metrics::EvaluationReport<Exact>;
