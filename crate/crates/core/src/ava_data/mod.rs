//! AVA-style annotation data: vocabularies, ground truth, detections.
//!
//! All three file kinds are plain comma-separated text without quoting:
//!
//! | file        | row layout                                               |
//! |-------------|----------------------------------------------------------|
//! | vocabulary  | `action_id,name` (optional header)                       |
//! | ground truth| `video_id,timestamp,x1,y1,x2,y2,action_id,person_id`     |
//! | detections  | `video_id,timestamp,x1,y1,x2,y2,action_id,score[,answer]`|
//!
//! Parsing is a single streaming pass. Records and indexes are immutable
//! after construction.

mod index;
mod parse;
mod serialize;
mod types;
mod validation;

pub use index::{build_index, EvalIndex, GtEntry, GtRef, IndexBuilder};
pub use parse::{
    parse_detections, parse_ground_truth, parse_vocabulary, CsvRecord, DataError, DetectionReader,
    GroundTruthReader, Interner, RecordReader, RowFailure,
};
pub use serialize::{serialize_detections, serialize_ground_truth, write_records};
pub use types::{
    ActionClass, ActionId, ActionVocabulary, BoundingBox, BoxError, ClassError, DetectionRecord,
    GroundTruthRecord, VideoId,
};
pub use validation::{RejectReason, RowIssue, ValidationReport};
