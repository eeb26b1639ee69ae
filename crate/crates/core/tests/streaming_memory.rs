//! Heap accounting for streamed input: memory tracks distinct content, not
//! file size.

mod common;

use std::cell::Cell;
use std::fmt::Write as _;
use std::io::BufReader;
use std::rc::Rc;
use std::sync::Mutex;

use ava_eval::ava_data::{DetectionReader, EvalIndex, GroundTruthReader, RejectReason};
use ava_eval::Strictness;
use common::*;

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

/// The allocator counters are process-wide, so measurements must not overlap.
static SERIAL: Mutex<()> = Mutex::new(());

const BUDGET: usize = 4 << 20;
const INPUT_BYTES: usize = 48 << 20;

fn repeating_text(lines: Vec<String>, min_bytes: usize) -> (impl std::io::Read, Rc<Cell<usize>>) {
    let produced = Rc::new(Cell::new(0usize));
    let counter = produced.clone();
    let mut i = 0;
    let text = GeneratedText::new(move |buf: &mut String| {
        if counter.get() >= min_bytes {
            return false;
        }
        for _ in 0..256 {
            buf.push_str(&lines[i % lines.len()]);
            i += 1;
        }
        counter.set(counter.get() + buf.len());
        counter.get() < min_bytes
    });
    (text, produced)
}

#[test]
fn duplicate_heavy_ground_truth_streams_in_bounded_memory() {
    let _guard = SERIAL.lock().unwrap();
    let vocab = vocab_of(40);
    let mut lines = Vec::new();
    for k in 0..5u32 {
        for a in 1..=40u32 {
            let mut line = String::new();
            let x = f64::from(a) / 100.0;
            let _ = writeln!(
                line,
                "vid{k},{:04},{x:.6},0.100000,{:.6},0.900000,{a},{k}",
                902 + k,
                x + 0.5
            );
            lines.push(line);
        }
    }
    let distinct = lines.len();

    let baseline = heap_in_use();
    reset_peak();
    let (text, produced) = repeating_text(lines, INPUT_BYTES);
    let mut reader =
        GroundTruthReader::<_, f64>::new(BufReader::new(text), &vocab, Strictness::Strict);
    let mut builder = EvalIndex::builder();
    let mut fresh = 0;
    for rec in reader.by_ref() {
        fresh += usize::from(builder.insert(rec.unwrap()));
    }
    let mut report = reader.into_report();
    let index = builder.finish();
    report.record_duplicates(index.duplicates_per_class());
    let peak = peak_heap().saturating_sub(baseline);

    assert!(produced.get() >= 10 * BUDGET);
    assert_eq!(fresh, distinct);
    assert_eq!(index.total_records(), distinct);
    assert_eq!(index.duplicate_count(), report.total_rows - distinct);
    assert_eq!(report.parsed_rows, distinct);
    assert_eq!(
        report.rejected_for(RejectReason::Duplicate),
        report.total_rows - distinct
    );
    assert!(
        peak <= BUDGET,
        "peak heap {peak} bytes for {} input bytes",
        produced.get()
    );
}

#[test]
fn lenient_detection_stream_keeps_bounded_diagnostics() {
    let _guard = SERIAL.lock().unwrap();
    let vocab = vocab_of(10);
    let mut lines = Vec::new();
    for i in 0..100u32 {
        let line = if i % 10 == 0 {
            format!("vid0,0902,0.1,0.1,0.05,0.5,{},0.5\n", 1 + i % 10)
        } else {
            format!(
                "vid{},0902,0.100000,0.100000,0.500000,0.500000,{},0.{:06},yes\n",
                i % 3,
                1 + i % 10,
                i
            )
        };
        lines.push(line);
    }

    let baseline = heap_in_use();
    reset_peak();
    let (text, produced) = repeating_text(lines, INPUT_BYTES);
    let mut reader =
        DetectionReader::<_, f64>::new(BufReader::new(text), &vocab, Strictness::Lenient);
    let mut kept = 0usize;
    for rec in reader.by_ref() {
        kept += usize::from(rec.unwrap().score > 0.0);
    }
    let report = reader.into_report();
    let peak = peak_heap().saturating_sub(baseline);

    assert!(produced.get() >= 10 * BUDGET);
    assert_eq!(
        report.parsed_rows + report.rejected_total(),
        report.total_rows
    );
    assert_eq!(
        report.rejected_for(RejectReason::DegenerateBox),
        report.total_rows.div_ceil(10)
    );
    assert_eq!(report.issues.len(), 10);
    assert!(kept > 0);
    assert!(peak <= BUDGET, "peak heap {peak} bytes");
}
