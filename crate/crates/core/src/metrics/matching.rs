use std::cmp::Ordering;
use std::collections::HashMap;

use smallvec::SmallVec;

use super::{iou, EvalConfig, MetricsError};
use crate::ava_data::{DetectionRecord, EvalIndex, GtRef};
use crate::scalar::Scalar;

/// A detection after matching, with its 1-based position in the class-wide
/// score ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDetection<'a, T = f64> {
    pub detection: &'a DetectionRecord<T>,
    /// The ground-truth box this detection claimed; present iff it is a TP.
    pub matched_gt: Option<GtRef>,
    pub rank: usize,
}

impl<T> LabeledDetection<'_, T> {
    pub fn is_tp(&self) -> bool {
        self.matched_gt.is_some()
    }
}

/// Ranking order: score descending, then `(video_id, timestamp_s, x1, y1,
/// x2, y2)` ascending, then answer text.
pub(crate) fn rank_order<T: Scalar>(a: &DetectionRecord<T>, b: &DetectionRecord<T>) -> Ordering {
    b.score
        .order(&a.score)
        .then_with(|| a.video_id.cmp(&b.video_id))
        .then_with(|| a.timestamp_s.cmp(&b.timestamp_s))
        .then_with(|| a.bbox.order(&b.bbox))
        .then_with(|| a.answer_text.cmp(&b.answer_text))
}

/// Labels every detection of one class as TP or FP.
///
/// Detections below the score floor are dropped, the rest ranked by
/// [`rank_order`]. Walking down the ranking, each detection claims the
/// still-unclaimed ground-truth box of highest IoU in its own keyframe
/// (earliest box wins IoU ties) and is a TP iff that IoU reaches the
/// threshold. A ground-truth box is claimed at most once.
pub fn match_class<'a, T: Scalar>(
    detections: &'a [DetectionRecord<T>],
    index: &EvalIndex<T>,
    config: &EvalConfig<T>,
) -> Result<Vec<LabeledDetection<'a, T>>, MetricsError> {
    let Some(first) = detections.first() else {
        return Ok(Vec::new());
    };
    let action = first.action_id;
    if let Some(other) = detections.iter().find(|d| d.action_id != action) {
        return Err(MetricsError::MixedClasses {
            expected: action,
            found: other.action_id,
        });
    }

    let floor = config.score_floor();
    let mut ranked: Vec<&DetectionRecord<T>> =
        detections.iter().filter(|d| d.score >= floor).collect();
    ranked.sort_by(|a, b| rank_order(a, b));

    let class = index.class(action);
    let threshold = config.iou_threshold();
    let mut claimed: HashMap<(u32, u32), SmallVec<[bool; 4]>> = HashMap::new();

    let labeled = ranked
        .into_iter()
        .enumerate()
        .map(|(i, det)| {
            let key = index
                .video_index(&det.video_id)
                .map(|v| (v, det.timestamp_s));
            let bucket = match (class, key) {
                (Some(c), Some(k)) => c.buckets.get(&k).map(|b| (k, b)),
                _ => None,
            };
            let matched_gt = bucket.and_then(|(key, gts)| {
                let taken = claimed
                    .entry(key)
                    .or_insert_with(|| SmallVec::from_elem(false, gts.len()));
                let mut best: Option<(usize, T)> = None;
                for (slot, gt) in gts.iter().enumerate() {
                    if taken[slot] {
                        continue;
                    }
                    let overlap = iou(&det.bbox, &gt.bbox);
                    if best.is_none_or(|(_, b)| overlap > b) {
                        best = Some((slot, overlap));
                    }
                }
                match best {
                    Some((slot, overlap)) if overlap >= threshold => {
                        taken[slot] = true;
                        Some(GtRef {
                            video_id: index.video_name(key.0).clone(),
                            timestamp_s: key.1,
                            slot,
                        })
                    }
                    _ => None,
                }
            });
            LabeledDetection {
                detection: det,
                matched_gt,
                rank: i + 1,
            }
        })
        .collect();
    Ok(labeled)
}
