use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, BufRead};
use std::marker::PhantomData;
use std::sync::Arc;

use thiserror::Error;

use super::types::{
    ActionClass, ActionId, ActionVocabulary, BoundingBox, BoxError, ClassError, DetectionRecord,
    GroundTruthRecord, VideoId,
};
use super::validation::{RejectReason, RowIssue, ValidationReport};
use crate::scalar::Scalar;
use crate::Strictness;

const MAX_FIELDS: usize = 9;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{0}")]
    Row(RowIssue),
    #[error("vocabulary line {line}: {detail}")]
    VocabularyLine { line: usize, detail: String },
    #[error(transparent)]
    Vocabulary(#[from] ClassError),
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Why a single row failed to parse: reason plus a human-readable detail.
pub type RowFailure = (RejectReason, String);

/// Deduplicates string fields so each distinct value is allocated once.
#[derive(Debug, Default)]
pub struct Interner {
    seen: HashSet<Arc<str>>,
}

impl Interner {
    pub fn intern(&mut self, s: &str) -> Arc<str> {
        if let Some(existing) = self.seen.get(s) {
            return existing.clone();
        }
        let fresh: Arc<str> = Arc::from(s);
        self.seen.insert(fresh.clone());
        fresh
    }
}

/// A record type with a fixed comma-separated row layout.
pub trait CsvRecord: Sized {
    /// Builds a record from the fields of one row.
    fn from_fields(
        fields: &[&str],
        vocab: &ActionVocabulary,
        interner: &mut Interner,
    ) -> Result<Self, RowFailure>;

    /// Appends the row (without line terminator).
    fn write_row(&self, out: &mut String);

    fn action_id(&self) -> ActionId;
}

fn malformed(detail: impl Into<String>) -> RowFailure {
    (RejectReason::MalformedField, detail.into())
}

fn parse_video_id(field: &str, interner: &mut Interner) -> Result<VideoId, RowFailure> {
    if field.is_empty() {
        return Err(malformed("empty video_id"));
    }
    Ok(interner.intern(field))
}

fn parse_uint(field: &str, what: &str) -> Result<u32, RowFailure> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!(
            "{what} {field:?} is not a non-negative integer"
        )));
    }
    field
        .parse()
        .map_err(|_| malformed(format!("{what} {field:?} is too large")))
}

fn parse_scalar<T: Scalar>(field: &str, what: &str) -> Result<T, RowFailure> {
    T::parse_decimal(field).ok_or_else(|| malformed(format!("{what} {field:?} is not a decimal")))
}

fn parse_box<T: Scalar>(fields: &[&str]) -> Result<BoundingBox<T>, RowFailure> {
    let x1 = parse_scalar(fields[0], "x1")?;
    let y1 = parse_scalar(fields[1], "y1")?;
    let x2 = parse_scalar(fields[2], "x2")?;
    let y2 = parse_scalar(fields[3], "y2")?;
    BoundingBox::new(x1, y1, x2, y2).map_err(|e| match e {
        BoxError::OutOfRange => (
            RejectReason::CoordinateOutOfRange,
            format!(
                "coordinates {},{},{},{} outside [0,1]",
                fields[0], fields[1], fields[2], fields[3]
            ),
        ),
        BoxError::Degenerate => (
            RejectReason::DegenerateBox,
            format!(
                "box {},{},{},{} has x2 <= x1 or y2 <= y1",
                fields[0], fields[1], fields[2], fields[3]
            ),
        ),
    })
}

fn parse_action(field: &str, vocab: &ActionVocabulary) -> Result<ActionId, RowFailure> {
    let id = ActionId(parse_uint(field, "action_id")?);
    if !vocab.contains(id) {
        return Err((
            RejectReason::UnknownAction,
            format!("action_id {id} not in vocabulary"),
        ));
    }
    Ok(id)
}

fn write_common<T: Scalar>(
    out: &mut String,
    video_id: &str,
    timestamp_s: u32,
    bbox: &BoundingBox<T>,
    action_id: ActionId,
) {
    let _ = write!(out, "{video_id},{timestamp_s:04}");
    for c in bbox.corners() {
        out.push(',');
        c.write_fixed(6, out);
    }
    let _ = write!(out, ",{action_id}");
}

impl<T: Scalar> CsvRecord for GroundTruthRecord<T> {
    fn from_fields(
        fields: &[&str],
        vocab: &ActionVocabulary,
        interner: &mut Interner,
    ) -> Result<Self, RowFailure> {
        if fields.len() != 8 {
            return Err(malformed(format!(
                "expected 8 fields, found {}",
                fields.len()
            )));
        }
        let video_id = parse_video_id(fields[0], interner)?;
        let timestamp_s = parse_uint(fields[1], "timestamp")?;
        let bbox = parse_box(&fields[2..6])?;
        let action_id = parse_action(fields[6], vocab)?;
        let person_id = parse_uint(fields[7], "person_id")?;
        Ok(Self {
            video_id,
            timestamp_s,
            bbox,
            action_id,
            person_id,
        })
    }

    fn write_row(&self, out: &mut String) {
        write_common(
            out,
            &self.video_id,
            self.timestamp_s,
            &self.bbox,
            self.action_id,
        );
        let _ = write!(out, ",{}", self.person_id);
    }

    fn action_id(&self) -> ActionId {
        self.action_id
    }
}

impl<T: Scalar> CsvRecord for DetectionRecord<T> {
    fn from_fields(
        fields: &[&str],
        vocab: &ActionVocabulary,
        interner: &mut Interner,
    ) -> Result<Self, RowFailure> {
        if fields.len() != 8 && fields.len() != 9 {
            return Err(malformed(format!(
                "expected 8 or 9 fields, found {}",
                fields.len()
            )));
        }
        let video_id = parse_video_id(fields[0], interner)?;
        let timestamp_s = parse_uint(fields[1], "timestamp")?;
        let bbox = parse_box(&fields[2..6])?;
        let action_id = parse_action(fields[6], vocab)?;
        let score: T = parse_scalar(fields[7], "score")?;
        if !score.is_unit_interval() {
            return Err((
                RejectReason::ScoreOutOfRange,
                format!("score {} outside [0,1]", fields[7]),
            ));
        }
        let answer_text = fields
            .get(8)
            .filter(|s| !s.is_empty())
            .map(|s| interner.intern(s));
        Ok(Self {
            video_id,
            timestamp_s,
            bbox,
            action_id,
            score,
            answer_text,
        })
    }

    fn write_row(&self, out: &mut String) {
        write_common(
            out,
            &self.video_id,
            self.timestamp_s,
            &self.bbox,
            self.action_id,
        );
        out.push(',');
        self.score.write_fixed(6, out);
        if let Some(answer) = self.answer_text.as_deref().filter(|a| !a.is_empty()) {
            out.push(',');
            out.push_str(answer);
        }
    }

    fn action_id(&self) -> ActionId {
        self.action_id
    }
}

/// Line reader that tracks 1-based line numbers and strips `\n` / `\r\n`.
struct Lines<R> {
    reader: R,
    buf: Vec<u8>,
    line_no: usize,
}

enum Line<'a> {
    Text(&'a str),
    NotUtf8,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Self {
            reader,
            buf: Vec::with_capacity(128),
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> io::Result<Option<Line<'_>>> {
        self.buf.clear();
        if self.reader.read_until(b'\n', &mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        let mut end = self.buf.len();
        if end > 0 && self.buf[end - 1] == b'\n' {
            end -= 1;
        }
        if end > 0 && self.buf[end - 1] == b'\r' {
            end -= 1;
        }
        Ok(Some(match std::str::from_utf8(&self.buf[..end]) {
            Ok(s) => Line::Text(s),
            Err(_) => Line::NotUtf8,
        }))
    }
}

/// Streaming parser over one CSV input.
///
/// Yields records in input order. Blank lines are skipped and not counted as
/// rows. In lenient mode invalid rows are tallied in [`report`](Self::report)
/// and skipped; in strict mode the first invalid row is yielded as
/// [`DataError::Row`] and iteration ends. I/O errors always end iteration.
pub struct RecordReader<'v, R, Rec> {
    lines: Lines<R>,
    vocab: &'v ActionVocabulary,
    strictness: Strictness,
    interner: Interner,
    report: ValidationReport,
    done: bool,
    _record: PhantomData<fn() -> Rec>,
}

pub type GroundTruthReader<'v, R, T = f64> = RecordReader<'v, R, GroundTruthRecord<T>>;
pub type DetectionReader<'v, R, T = f64> = RecordReader<'v, R, DetectionRecord<T>>;

impl<'v, R: BufRead, Rec: CsvRecord> RecordReader<'v, R, Rec> {
    pub fn new(reader: R, vocab: &'v ActionVocabulary, strictness: Strictness) -> Self {
        Self {
            lines: Lines::new(reader),
            vocab,
            strictness,
            interner: Interner::default(),
            report: ValidationReport::default(),
            done: false,
            _record: PhantomData,
        }
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn into_report(self) -> ValidationReport {
        self.report
    }

    fn parse_next(&mut self) -> Option<Result<Rec, DataError>> {
        loop {
            let line = match self.lines.next_line() {
                Ok(Some(line)) => line,
                Ok(None) => return None,
                Err(e) => return Some(Err(e.into())),
            };
            let outcome = match line {
                Line::NotUtf8 => Err(malformed("line is not valid UTF-8")),
                Line::Text("") => continue,
                Line::Text(text) => {
                    let mut fields = [""; MAX_FIELDS];
                    let mut n = 0;
                    let mut overflow = false;
                    for f in text.split(',') {
                        if n == MAX_FIELDS {
                            overflow = true;
                            break;
                        }
                        fields[n] = f;
                        n += 1;
                    }
                    if overflow {
                        Err(malformed("too many fields"))
                    } else {
                        Rec::from_fields(&fields[..n], self.vocab, &mut self.interner)
                    }
                }
            };
            match outcome {
                Ok(record) => {
                    self.report.accept(record.action_id());
                    return Some(Ok(record));
                }
                Err((reason, detail)) => {
                    let issue = RowIssue {
                        line: self.lines.line_no,
                        reason,
                        detail,
                    };
                    self.report.reject(issue.clone());
                    if self.strictness == Strictness::Strict {
                        return Some(Err(DataError::Row(issue)));
                    }
                }
            }
        }
    }
}

impl<R: BufRead, Rec: CsvRecord> Iterator for RecordReader<'_, R, Rec> {
    type Item = Result<Rec, DataError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.parse_next();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

fn collect_all<R: BufRead, Rec: CsvRecord>(
    input: R,
    vocab: &ActionVocabulary,
    strictness: Strictness,
) -> Result<(Vec<Rec>, ValidationReport), DataError> {
    let mut reader = RecordReader::new(input, vocab, strictness);
    let records = reader.by_ref().collect::<Result<Vec<Rec>, _>>()?;
    Ok((records, reader.into_report()))
}

/// Parses a whole ground-truth file (`video_id,timestamp,x1,y1,x2,y2,action_id,person_id`).
///
/// Use [`GroundTruthReader`] directly to stream into an index without
/// materializing the records.
pub fn parse_ground_truth<T: Scalar, R: BufRead>(
    input: R,
    vocab: &ActionVocabulary,
    strictness: Strictness,
) -> Result<(Vec<GroundTruthRecord<T>>, ValidationReport), DataError> {
    collect_all(input, vocab, strictness)
}

/// Parses a whole detection file (`video_id,timestamp,x1,y1,x2,y2,action_id,score[,answer_text]`).
pub fn parse_detections<T: Scalar, R: BufRead>(
    input: R,
    vocab: &ActionVocabulary,
    strictness: Strictness,
) -> Result<(Vec<DetectionRecord<T>>, ValidationReport), DataError> {
    collect_all(input, vocab, strictness)
}

/// Parses an `action_id,name` vocabulary. A first line whose first field is
/// not numeric is treated as a header.
pub fn parse_vocabulary<R: BufRead>(input: R) -> Result<ActionVocabulary, DataError> {
    let mut lines = Lines::new(input);
    let mut classes = Vec::new();
    let mut first = true;
    loop {
        let line_no = lines.line_no + 1;
        let Some(line) = lines.next_line()? else {
            break;
        };
        let bad = |detail: String| DataError::VocabularyLine {
            line: line_no,
            detail,
        };
        let text = match line {
            Line::Text(t) => t,
            Line::NotUtf8 => return Err(bad("not valid UTF-8".into())),
        };
        if text.trim().is_empty() {
            continue;
        }
        let (id_field, name) = text
            .split_once(',')
            .ok_or_else(|| bad(format!("expected `action_id,name`, got {text:?}")))?;
        let id_field = id_field.trim();
        let is_numeric = !id_field.is_empty() && id_field.bytes().all(|b| b.is_ascii_digit());
        if first && !is_numeric {
            first = false;
            continue;
        }
        first = false;
        if !is_numeric {
            return Err(bad(format!("action id {id_field:?} is not an integer")));
        }
        let id: u32 = id_field
            .parse()
            .map_err(|_| bad(format!("action id {id_field:?} is too large")))?;
        let class = ActionClass::new(id, name.trim()).map_err(|e| bad(e.to_string()))?;
        classes.push(class);
    }
    if classes.is_empty() {
        return Err(DataError::EmptyVocabulary);
    }
    Ok(ActionVocabulary::new(classes)?)
}
