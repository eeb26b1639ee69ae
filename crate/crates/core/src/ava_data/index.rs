use std::collections::{BTreeMap, HashMap};

use smallvec::SmallVec;

use super::types::{ActionId, BoundingBox, GroundTruthRecord, VideoId};
use crate::scalar::Scalar;

/// A ground-truth box inside a keyframe bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtEntry<T> {
    pub bbox: BoundingBox<T>,
    pub person_id: u32,
}

/// Identifies one ground-truth box: its keyframe and its position within
/// that keyframe's bucket (input order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GtRef {
    pub video_id: VideoId,
    pub timestamp_s: u32,
    pub slot: usize,
}

/// `(video index, timestamp)` of a keyframe inside an [`EvalIndex`].
pub(crate) type KeyframeKey = (u32, u32);

type Bucket<T> = SmallVec<[GtEntry<T>; 1]>;

#[derive(Debug, Clone)]
pub(crate) struct ClassGroundTruth<T> {
    pub(crate) buckets: HashMap<KeyframeKey, Bucket<T>>,
    pub(crate) count: usize,
}

impl<T> Default for ClassGroundTruth<T> {
    fn default() -> Self {
        Self {
            buckets: HashMap::new(),
            count: 0,
        }
    }
}

/// Ground truth bucketed by `(action_id, video_id, timestamp_s)`.
///
/// Immutable once built; share it freely across evaluation threads.
#[derive(Debug, Clone)]
pub struct EvalIndex<T = f64> {
    videos: Vec<VideoId>,
    video_lookup: HashMap<VideoId, u32>,
    classes: BTreeMap<ActionId, ClassGroundTruth<T>>,
    total: usize,
    duplicates: BTreeMap<ActionId, usize>,
}

impl<T: Scalar> EvalIndex<T> {
    pub fn builder() -> IndexBuilder<T> {
        IndexBuilder {
            index: EvalIndex {
                videos: Vec::new(),
                video_lookup: HashMap::new(),
                classes: BTreeMap::new(),
                total: 0,
                duplicates: BTreeMap::new(),
            },
        }
    }

    /// Number of distinct ground-truth boxes kept.
    pub fn total_records(&self) -> usize {
        self.total
    }

    /// Exact duplicates dropped while building.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates.values().sum()
    }

    pub fn duplicates_per_class(&self) -> &BTreeMap<ActionId, usize> {
        &self.duplicates
    }

    pub fn num_gt(&self, action: ActionId) -> usize {
        self.classes.get(&action).map_or(0, |c| c.count)
    }

    pub fn gt_count_per_class(&self) -> BTreeMap<ActionId, usize> {
        self.classes.iter().map(|(&a, c)| (a, c.count)).collect()
    }

    pub fn class_ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.classes.keys().copied()
    }

    pub fn num_videos(&self) -> usize {
        self.videos.len()
    }

    /// Ground truth of one class at one keyframe, in input order.
    pub fn bucket(&self, action: ActionId, video_id: &str, timestamp_s: u32) -> &[GtEntry<T>] {
        self.video_index(video_id)
            .and_then(|v| self.class(action)?.buckets.get(&(v, timestamp_s)))
            .map_or(&[], |b| b.as_slice())
    }

    /// All non-empty buckets of a class as `(video_id, timestamp_s, boxes)`.
    pub fn buckets(
        &self,
        action: ActionId,
    ) -> impl Iterator<Item = (&VideoId, u32, &[GtEntry<T>])> + '_ {
        self.class(action).into_iter().flat_map(move |c| {
            c.buckets
                .iter()
                .map(move |(&(v, ts), b)| (&self.videos[v as usize], ts, b.as_slice()))
        })
    }

    pub(crate) fn video_index(&self, video_id: &str) -> Option<u32> {
        self.video_lookup.get(video_id).copied()
    }

    pub(crate) fn video_name(&self, index: u32) -> &VideoId {
        &self.videos[index as usize]
    }

    pub(crate) fn class(&self, action: ActionId) -> Option<&ClassGroundTruth<T>> {
        self.classes.get(&action)
    }
}

/// Incremental index construction, one record at a time, so a parser can
/// stream straight into the index.
#[derive(Debug)]
pub struct IndexBuilder<T> {
    index: EvalIndex<T>,
}

impl<T: Scalar> IndexBuilder<T> {
    /// Adds a record. Returns `false` if an identical
    /// `(video_id, timestamp_s, box, action_id)` was already present.
    pub fn insert(&mut self, record: GroundTruthRecord<T>) -> bool {
        let index = &mut self.index;
        let video = match index.video_lookup.get(&*record.video_id) {
            Some(&v) => v,
            None => {
                let v = u32::try_from(index.videos.len()).expect("more than u32::MAX videos");
                index.videos.push(record.video_id.clone());
                index.video_lookup.insert(record.video_id.clone(), v);
                v
            }
        };
        let class = index.classes.entry(record.action_id).or_default();
        let bucket = class
            .buckets
            .entry((video, record.timestamp_s))
            .or_default();
        if bucket.iter().any(|e| e.bbox == record.bbox) {
            *index.duplicates.entry(record.action_id).or_default() += 1;
            return false;
        }
        bucket.push(GtEntry {
            bbox: record.bbox,
            person_id: record.person_id,
        });
        class.count += 1;
        index.total += 1;
        true
    }

    pub fn finish(self) -> EvalIndex<T> {
        self.index
    }
}

/// Buckets validated ground truth, dropping exact duplicates.
pub fn build_index<T: Scalar>(
    records: impl IntoIterator<Item = GroundTruthRecord<T>>,
) -> EvalIndex<T> {
    let mut builder = EvalIndex::builder();
    for r in records {
        builder.insert(r);
    }
    builder.finish()
}
