use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{average_precision, match_class, pr_curve, EvalConfig, MetricsError, PRCurve};
use crate::ava_data::{ActionId, ActionVocabulary, DetectionRecord, EvalIndex};
use crate::scalar::Scalar;

/// AP of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ApResult<T = f64> {
    pub action_id: ActionId,
    /// `None` when the class has no ground truth; such classes are left out
    /// of the mAP.
    pub ap: Option<T>,
    pub num_gt: usize,
    /// Detections admitted after the score floor.
    pub num_det: usize,
    pub curve: Option<PRCurve<T>>,
}

impl<T> ApResult<T> {
    pub fn is_evaluable(&self) -> bool {
        self.num_gt > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Totals {
    pub classes: usize,
    pub evaluable_classes: usize,
    pub num_gt: usize,
    pub num_det: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport<T = f64> {
    classes: Vec<ApResult<T>>,
    map: Option<T>,
    config: EvalConfig<T>,
    totals: Totals,
}

impl<T: Scalar> EvaluationReport<T> {
    /// Assembles a report from per-class results, ordering them by action id
    /// and computing the mAP over classes with ground truth.
    pub fn from_results(mut classes: Vec<ApResult<T>>, config: EvalConfig<T>) -> Self {
        classes.sort_by_key(|c| c.action_id);
        let mut totals = Totals {
            classes: classes.len(),
            ..Totals::default()
        };
        let mut sum = T::zero();
        for c in &classes {
            totals.num_gt += c.num_gt;
            totals.num_det += c.num_det;
            if let (true, Some(ap)) = (c.is_evaluable(), c.ap) {
                totals.evaluable_classes += 1;
                sum = sum + ap;
            }
        }
        let map =
            (totals.evaluable_classes > 0).then(|| sum / T::from_count(totals.evaluable_classes));
        Self {
            classes,
            map,
            config,
            totals,
        }
    }

    /// Per-class results in ascending action id order.
    pub fn classes(&self) -> &[ApResult<T>] {
        &self.classes
    }

    pub fn class(&self, id: ActionId) -> Option<&ApResult<T>> {
        self.classes
            .binary_search_by_key(&id, |c| c.action_id)
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Mean AP over classes with ground truth; `None` if there are none.
    pub fn map(&self) -> Option<T> {
        self.map
    }

    pub fn config(&self) -> &EvalConfig<T> {
        &self.config
    }

    pub fn totals(&self) -> Totals {
        self.totals
    }
}

fn group_detections<T: Scalar>(
    detections: impl IntoIterator<Item = DetectionRecord<T>>,
    vocab: &ActionVocabulary,
) -> Result<BTreeMap<ActionId, Vec<DetectionRecord<T>>>, MetricsError> {
    let mut grouped: BTreeMap<ActionId, Vec<DetectionRecord<T>>> = BTreeMap::new();
    for d in detections {
        if !vocab.contains(d.action_id) {
            return Err(MetricsError::UnknownAction(d.action_id));
        }
        grouped.entry(d.action_id).or_default().push(d);
    }
    Ok(grouped)
}

fn evaluate_grouped<T: Scalar>(
    index: &EvalIndex<T>,
    grouped: &BTreeMap<ActionId, Vec<DetectionRecord<T>>>,
    vocab: &ActionVocabulary,
    config: &EvalConfig<T>,
) -> Result<EvaluationReport<T>, MetricsError> {
    if let Some(stray) = index.class_ids().find(|&a| !vocab.contains(a)) {
        return Err(MetricsError::UnknownAction(stray));
    }
    let ids: Vec<ActionId> = vocab.ids().collect();
    let results = ids
        .par_iter()
        .map(|&action| {
            let dets = grouped.get(&action).map_or(&[][..], Vec::as_slice);
            let num_gt = index.num_gt(action);
            let labeled = match_class(dets, index, config)?;
            let num_det = labeled.len();
            if num_gt == 0 {
                return Ok(ApResult {
                    action_id: action,
                    ap: None,
                    num_gt,
                    num_det,
                    curve: None,
                });
            }
            let curve = pr_curve(&labeled, num_gt)?;
            let ap = average_precision(&curve, config.interpolation());
            Ok(ApResult {
                action_id: action,
                ap: Some(ap),
                num_gt,
                num_det,
                curve: config.retain_curves().then_some(curve),
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(EvaluationReport::from_results(results, *config))
}

/// Scores detections against indexed ground truth, one AP per vocabulary
/// class.
///
/// Classes are evaluated in parallel on the current rayon pool; the result
/// does not depend on the pool size or on detection input order.
pub fn evaluate<T: Scalar>(
    index: &EvalIndex<T>,
    detections: impl IntoIterator<Item = DetectionRecord<T>>,
    vocab: &ActionVocabulary,
    config: &EvalConfig<T>,
) -> Result<EvaluationReport<T>, MetricsError> {
    let grouped = group_detections(detections, vocab)?;
    evaluate_grouped(index, &grouped, vocab, config)
}

/// [`evaluate`] on a dedicated pool of `threads` workers.
pub fn evaluate_with_threads<T: Scalar>(
    index: &EvalIndex<T>,
    detections: impl IntoIterator<Item = DetectionRecord<T>>,
    vocab: &ActionVocabulary,
    config: &EvalConfig<T>,
    threads: usize,
) -> Result<EvaluationReport<T>, MetricsError> {
    let grouped = group_detections(detections, vocab)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| MetricsError::ThreadPool(e.to_string()))?;
    pool.install(|| evaluate_grouped(index, &grouped, vocab, config))
}
