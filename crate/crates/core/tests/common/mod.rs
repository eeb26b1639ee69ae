//! Test-only oracles and generators.
//!
//! Nothing here calls into the library's matching, curve or AP code: the
//! brute-force evaluator re-derives every number from the definitions with
//! exact rational arithmetic, so agreement with the library is meaningful.

#![allow(dead_code)]

use std::alloc::{GlobalAlloc, Layout, System};
use std::cmp::Ordering;
use std::io::{self, Read};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use ava_eval::ava_data::{
    ActionClass, ActionId, ActionVocabulary, BoundingBox, DetectionRecord, GroundTruthRecord,
};
use ava_eval::metrics::Interpolation;
use num_rational::Ratio;
use rand::Rng;

pub type Q = Ratio<i128>;

// ---------------------------------------------------------------------------
// Allocation accounting

pub struct CountingAlloc;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), AtomicOrdering::Relaxed) + layout.size();
            PEAK.fetch_max(now, AtomicOrdering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), AtomicOrdering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                let grow = new_size - layout.size();
                let now = CURRENT.fetch_add(grow, AtomicOrdering::Relaxed) + grow;
                PEAK.fetch_max(now, AtomicOrdering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, AtomicOrdering::Relaxed);
            }
        }
        p
    }
}

pub fn heap_in_use() -> usize {
    CURRENT.load(AtomicOrdering::Relaxed)
}

/// Resets the high-water mark to the current usage.
pub fn reset_peak() {
    PEAK.store(
        CURRENT.load(AtomicOrdering::Relaxed),
        AtomicOrdering::Relaxed,
    );
}

pub fn peak_heap() -> usize {
    PEAK.load(AtomicOrdering::Relaxed)
}

// ---------------------------------------------------------------------------
// Streaming text generator

/// A `Read` that produces text on demand, never holding more than one chunk.
pub struct GeneratedText<F> {
    fill: F,
    buf: String,
    pos: usize,
    pub bytes_emitted: usize,
}

impl<F: FnMut(&mut String) -> bool> GeneratedText<F> {
    /// `fill` appends some lines and returns `false` once exhausted.
    pub fn new(fill: F) -> Self {
        Self {
            fill,
            buf: String::new(),
            pos: 0,
            bytes_emitted: 0,
        }
    }
}

impl<F: FnMut(&mut String) -> bool> Read for GeneratedText<F> {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        while self.pos == self.buf.len() {
            self.buf.clear();
            self.pos = 0;
            if !(self.fill)(&mut self.buf) && self.buf.is_empty() {
                return Ok(0);
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf.as_bytes()[self.pos..self.pos + n]);
        self.pos += n;
        self.bytes_emitted += n;
        Ok(n)
    }
}

// ---------------------------------------------------------------------------
// Geometry oracles

/// IoU by counting grid cells whose centres fall inside each box.
pub fn rasterized_iou(a: [f64; 4], b: [f64; 4], grid: usize) -> f64 {
    let inside = |bx: &[f64; 4], x: f64, y: f64| x >= bx[0] && x < bx[2] && y >= bx[1] && y < bx[3];
    let (mut inter, mut union) = (0u64, 0u64);
    let step = 1.0 / grid as f64;
    for i in 0..grid {
        let x = (i as f64 + 0.5) * step;
        let in_ax = x >= a[0] && x < a[2];
        let in_bx = x >= b[0] && x < b[2];
        if !in_ax && !in_bx {
            continue;
        }
        for j in 0..grid {
            let y = (j as f64 + 0.5) * step;
            let ia = inside(&a, x, y);
            let ib = inside(&b, x, y);
            inter += u64::from(ia && ib);
            union += u64::from(ia || ib);
        }
    }
    inter as f64 / union as f64
}

/// Exact value of a finite `f64` (every finite double is a dyadic rational).
pub fn q(v: f64) -> Q {
    assert!(v.is_finite());
    if v == 0.0 {
        return Q::from_integer(0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1 << 52) - 1)) as i128;
    let (mantissa, exp) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    };
    let value = if exp >= 0 {
        Q::from_integer(mantissa << exp)
    } else {
        Q::new(mantissa, 1i128 << (-exp).min(126))
    };
    value * Q::from_integer(sign)
}

/// Exact IoU from the area definition.
pub fn exact_iou(a: [Q; 4], b: [Q; 4]) -> Q {
    let zero = Q::from_integer(0);
    let w = (a[2].min(b[2]) - a[0].max(b[0])).max(zero);
    let h = (a[3].min(b[3]) - a[1].max(b[1])).max(zero);
    let inter = w * h;
    let area = |r: [Q; 4]| (r[2] - r[0]) * (r[3] - r[1]);
    inter / (area(a) + area(b) - inter)
}

pub fn corners(b: &BoundingBox<f64>) -> [Q; 4] {
    [q(b.x1()), q(b.y1()), q(b.x2()), q(b.y2())]
}

// ---------------------------------------------------------------------------
// Random instances

/// Boxes on a 1/64 grid so every area and overlap is exact in `f64`.
pub fn grid_box<R: Rng>(rng: &mut R) -> BoundingBox<f64> {
    let (x1, x2) = ordered_pair(rng);
    let (y1, y2) = ordered_pair(rng);
    BoundingBox::new(
        x1 as f64 / 64.0,
        y1 as f64 / 64.0,
        x2 as f64 / 64.0,
        y2 as f64 / 64.0,
    )
    .unwrap()
}

fn ordered_pair<R: Rng>(rng: &mut R) -> (u32, u32) {
    loop {
        let a = rng.gen_range(0..=64);
        let b = rng.gen_range(0..=64);
        if a != b {
            return (a.min(b), a.max(b));
        }
    }
}

/// A box that overlaps `base` heavily, still on the grid.
pub fn jitter<R: Rng>(rng: &mut R, base: &BoundingBox<f64>) -> BoundingBox<f64> {
    let g = |v: f64| (v * 64.0).round() as i32;
    let mut c = [g(base.x1()), g(base.y1()), g(base.x2()), g(base.y2())];
    for v in &mut c {
        *v = (*v + rng.gen_range(-3..=3)).clamp(0, 64);
    }
    if c[2] <= c[0] {
        c[2] = (c[0] + 1).min(64);
        c[0] = c[2] - 1;
    }
    if c[3] <= c[1] {
        c[3] = (c[1] + 1).min(64);
        c[1] = c[3] - 1;
    }
    BoundingBox::new(
        c[0] as f64 / 64.0,
        c[1] as f64 / 64.0,
        c[2] as f64 / 64.0,
        c[3] as f64 / 64.0,
    )
    .unwrap()
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub vocab: ActionVocabulary,
    pub gts: Vec<GroundTruthRecord>,
    pub dets: Vec<DetectionRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub max_gt: usize,
    pub max_det: usize,
    pub max_keyframes: usize,
    pub max_classes: usize,
}

pub const SMALL: InstanceShape = InstanceShape {
    max_gt: 20,
    max_det: 20,
    max_keyframes: 5,
    max_classes: 10,
};

pub fn vocab_of(n: u32) -> ActionVocabulary {
    ActionVocabulary::new((1..=n).map(|i| ActionClass::new(i, format!("action {i}")).unwrap()))
        .unwrap()
}

/// Random ground truth and detections. Scores come from a coarse set so
/// ties are common; some detections are jittered copies of ground truth,
/// some copy it exactly, the rest are random.
pub fn random_instance<R: Rng>(rng: &mut R, shape: InstanceShape) -> Instance {
    let n_classes = rng.gen_range(1..=shape.max_classes) as u32;
    let n_keyframes = rng.gen_range(1..=shape.max_keyframes);
    let keyframes: Vec<(Arc<str>, u32)> = (0..n_keyframes)
        .map(|k| (Arc::from(format!("vid{}", k % 2)), 900 + k as u32))
        .collect();
    let vocab = vocab_of(n_classes);
    let n_gt = rng.gen_range(0..=shape.max_gt);
    let gts: Vec<GroundTruthRecord> = (0..n_gt)
        .map(|p| {
            let (video, ts) = keyframes[rng.gen_range(0..n_keyframes)].clone();
            GroundTruthRecord {
                video_id: video,
                timestamp_s: ts,
                bbox: grid_box(rng),
                action_id: ActionId(rng.gen_range(1..=n_classes)),
                person_id: p as u32,
            }
        })
        .collect();
    let n_det = rng.gen_range(0..=shape.max_det);
    let dets = (0..n_det)
        .map(|_| {
            let score = rng.gen_range(0..=10) as f64 / 10.0;
            let roll = rng.gen_range(0..10);
            if !gts.is_empty() && roll < 6 {
                let g = &gts[rng.gen_range(0..gts.len())];
                let bbox = if roll < 2 {
                    g.bbox
                } else {
                    jitter(rng, &g.bbox)
                };
                let action_id = if roll == 5 {
                    ActionId(rng.gen_range(1..=n_classes))
                } else {
                    g.action_id
                };
                DetectionRecord {
                    video_id: g.video_id.clone(),
                    timestamp_s: g.timestamp_s,
                    bbox,
                    action_id,
                    score,
                    answer_text: None,
                }
            } else {
                let (video, ts) = keyframes[rng.gen_range(0..n_keyframes)].clone();
                DetectionRecord {
                    video_id: video,
                    timestamp_s: ts,
                    bbox: grid_box(rng),
                    action_id: ActionId(rng.gen_range(1..=n_classes)),
                    score,
                    answer_text: None,
                }
            }
        })
        .collect();
    Instance { vocab, gts, dets }
}

// ---------------------------------------------------------------------------
// Brute-force evaluator

#[derive(Debug, Clone, PartialEq)]
pub struct OracleClass {
    pub action: ActionId,
    pub num_gt: usize,
    pub labels: Vec<bool>,
    pub ap: Option<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub classes: Vec<OracleClass>,
    pub map: Option<Q>,
}

fn det_key_cmp(a: &DetectionRecord, b: &DetectionRecord) -> Ordering {
    let ka = (&*a.video_id, a.timestamp_s, corners(&a.bbox));
    let kb = (&*b.video_id, b.timestamp_s, corners(&b.bbox));
    q(b.score).cmp(&q(a.score)).then_with(|| ka.cmp(&kb))
}

/// Greedy labels for one class, scanning every ground-truth box for every
/// detection.
pub fn oracle_labels(
    gts: &[GroundTruthRecord],
    dets: &[DetectionRecord],
    action: ActionId,
    iou_threshold: Q,
    score_floor: Q,
) -> (usize, Vec<bool>) {
    // drop exact duplicates, keep first occurrence
    let mut class_gt: Vec<&GroundTruthRecord> = Vec::new();
    for g in gts.iter().filter(|g| g.action_id == action) {
        let dup = class_gt.iter().any(|k| {
            k.video_id == g.video_id && k.timestamp_s == g.timestamp_s && k.bbox == g.bbox
        });
        if !dup {
            class_gt.push(g);
        }
    }
    let mut class_det: Vec<&DetectionRecord> = dets
        .iter()
        .filter(|d| d.action_id == action && q(d.score) >= score_floor)
        .collect();
    class_det.sort_by(|a, b| det_key_cmp(a, b));

    let mut used = vec![false; class_gt.len()];
    let mut labels = Vec::with_capacity(class_det.len());
    for d in class_det {
        let mut best: Option<(usize, Q)> = None;
        for (gi, g) in class_gt.iter().enumerate() {
            if used[gi] || g.video_id != d.video_id || g.timestamp_s != d.timestamp_s {
                continue;
            }
            let o = exact_iou(corners(&d.bbox), corners(&g.bbox));
            match best {
                Some((_, b)) if o <= b => {}
                _ => best = Some((gi, o)),
            }
        }
        let tp = matches!(best, Some((_, o)) if o >= iou_threshold);
        if tp {
            used[best.unwrap().0] = true;
        }
        labels.push(tp);
    }
    (class_gt.len(), labels)
}

/// `(recall, precision)` for every prefix, counted from scratch.
pub fn oracle_points(labels: &[bool], num_gt: usize) -> Vec<(Q, Q)> {
    (1..=labels.len())
        .map(|k| {
            let tp = labels[..k].iter().filter(|&&t| t).count() as i128;
            (Q::new(tp, num_gt as i128), Q::new(tp, k as i128))
        })
        .collect()
}

pub fn oracle_ap(labels: &[bool], num_gt: usize, mode: Interpolation) -> Q {
    let pts = oracle_points(labels, num_gt);
    let zero = Q::from_integer(0);
    let best_precision_from = |r: Q| {
        pts.iter()
            .filter(|(rec, _)| *rec >= r)
            .map(|&(_, p)| p)
            .max()
            .unwrap_or(zero)
    };
    match mode {
        Interpolation::AllPoint => {
            let mut levels: Vec<Q> = pts.iter().map(|&(r, _)| r).filter(|&r| r > zero).collect();
            levels.sort();
            levels.dedup();
            let mut prev = zero;
            let mut ap = zero;
            for r in levels {
                ap += (r - prev) * best_precision_from(r);
                prev = r;
            }
            ap
        }
        Interpolation::ElevenPoint => {
            let total: Q = (0..=10).map(|t| best_precision_from(Q::new(t, 10))).sum();
            total / Q::from_integer(11)
        }
    }
}

pub fn oracle_evaluate(
    inst: &Instance,
    iou_threshold: Q,
    score_floor: Q,
    mode: Interpolation,
) -> OracleReport {
    let mut classes = Vec::new();
    for class in &inst.vocab {
        let (num_gt, labels) = oracle_labels(
            &inst.gts,
            &inst.dets,
            class.id(),
            iou_threshold,
            score_floor,
        );
        let ap = (num_gt > 0).then(|| oracle_ap(&labels, num_gt, mode));
        classes.push(OracleClass {
            action: class.id(),
            num_gt,
            labels,
            ap,
        });
    }
    let aps: Vec<Q> = classes.iter().filter_map(|c| c.ap).collect();
    let map = (!aps.is_empty())
        .then(|| aps.iter().copied().sum::<Q>() / Q::from_integer(aps.len() as i128));
    OracleReport { classes, map }
}

pub fn to_f64(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}
