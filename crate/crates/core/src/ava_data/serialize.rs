use std::io::{self, Write};

use super::parse::CsvRecord;
use super::types::{DetectionRecord, GroundTruthRecord};
use crate::scalar::Scalar;

/// Writes records one row per line, each terminated by `\n`.
///
/// Coordinates and scores carry exactly six decimals; timestamps are
/// zero-padded to four digits.
pub fn write_records<'a, Rec, W>(
    records: impl IntoIterator<Item = &'a Rec>,
    mut out: W,
) -> io::Result<()>
where
    Rec: CsvRecord + 'a,
    W: Write,
{
    let mut line = String::with_capacity(96);
    for r in records {
        line.clear();
        r.write_row(&mut line);
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

fn to_string<'a, Rec: CsvRecord + 'a>(records: impl IntoIterator<Item = &'a Rec>) -> String {
    let mut s = String::new();
    for r in records {
        r.write_row(&mut s);
        s.push('\n');
    }
    s
}

pub fn serialize_ground_truth<'a, T: Scalar>(
    records: impl IntoIterator<Item = &'a GroundTruthRecord<T>>,
) -> String {
    to_string(records)
}

pub fn serialize_detections<'a, T: Scalar>(
    records: impl IntoIterator<Item = &'a DetectionRecord<T>>,
) -> String {
    to_string(records)
}
