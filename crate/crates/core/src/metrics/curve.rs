use super::{Interpolation, LabeledDetection, MetricsError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint<T> {
    pub recall: T,
    pub precision: T,
}

/// Precision and recall after each prefix of the ranked detections.
///
/// Point `k` (0-based) holds `recall = TP_k / num_gt` and
/// `precision = TP_k / (k + 1)`, where `TP_k` counts true positives among the
/// first `k + 1` detections.
#[derive(Debug, Clone, PartialEq)]
pub struct PRCurve<T = f64> {
    points: Vec<PrPoint<T>>,
    num_gt: usize,
}

impl<T: Scalar> PRCurve<T> {
    /// Builds the curve from TP/FP flags in rank order.
    pub fn from_flags(
        flags: impl IntoIterator<Item = bool>,
        num_gt: usize,
    ) -> Result<Self, MetricsError> {
        if num_gt == 0 {
            return Err(MetricsError::NoGroundTruth);
        }
        let total = T::from_count(num_gt);
        let mut tp = 0usize;
        let points = flags
            .into_iter()
            .enumerate()
            .map(|(i, is_tp)| {
                tp += usize::from(is_tp);
                let hits = T::from_count(tp);
                PrPoint {
                    recall: hits / total,
                    precision: hits / T::from_count(i + 1),
                }
            })
            .collect();
        Ok(Self { points, num_gt })
    }

    pub fn points(&self) -> &[PrPoint<T>] {
        &self.points
    }

    pub fn num_gt(&self) -> usize {
        self.num_gt
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Precision at each point replaced by the best precision at that point
    /// or any later (higher-recall) one.
    pub fn envelope(&self) -> Vec<T> {
        let mut env: Vec<T> = self.points.iter().map(|p| p.precision).collect();
        for i in (0..env.len().saturating_sub(1)).rev() {
            env[i] = env[i].max_of(env[i + 1]);
        }
        env
    }
}

/// Curve over labeled detections already sorted by rank.
pub fn pr_curve<T: Scalar>(
    labeled: &[LabeledDetection<'_, T>],
    num_gt: usize,
) -> Result<PRCurve<T>, MetricsError> {
    PRCurve::from_flags(labeled.iter().map(LabeledDetection::is_tp), num_gt)
}

/// Interpolated average precision of a curve. An empty curve scores 0.
pub fn average_precision<T: Scalar>(curve: &PRCurve<T>, mode: Interpolation) -> T {
    if curve.is_empty() {
        return T::zero();
    }
    let envelope = curve.envelope();
    match mode {
        Interpolation::AllPoint => {
            let mut ap = T::zero();
            let mut prev_recall = T::zero();
            for (p, &env) in curve.points.iter().zip(&envelope) {
                if p.recall > prev_recall {
                    ap = ap + (p.recall - prev_recall) * env;
                    prev_recall = p.recall;
                }
            }
            ap
        }
        Interpolation::ElevenPoint => {
            let ten = T::from_count(10);
            let mut sum = T::zero();
            // recall is non-decreasing, so the first point reaching each
            // level carries the envelope value for that level
            let mut i = 0;
            for level in 0..=10 {
                let target = T::from_count(level) / ten;
                while i < curve.points.len() && curve.points[i].recall < target {
                    i += 1;
                }
                if i == curve.points.len() {
                    break;
                }
                sum = sum + envelope[i];
            }
            sum / T::from_count(11)
        }
    }
}
