//! Ranked best/worst tables, report CSV/Markdown rendering and PR-curve
//! export.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::ava_data::{ActionClass, ActionId, ActionVocabulary, ClassError};
use crate::metrics::{ApResult, EvalConfig, EvaluationReport};
use crate::scalar::Scalar;

/// Default number of rows in each half of a ranked table.
pub const DEFAULT_K: usize = 5;

pub const REPORT_CSV_HEADER: &str = "action_id,name,ap,num_gt,num_det";
pub const PR_CSV_HEADER: &str = "action_id,rank,recall,precision";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no evaluable classes")]
    NoEvaluableClasses,
    #[error("action id {0} has no name in the vocabulary")]
    UnknownAction(ActionId),
    #[error("PR curves were not retained; rerun with curve retention enabled")]
    CurvesNotRetained,
    #[error("unknown report format {0:?} (expected csv or markdown)")]
    UnknownFormat(String),
    #[error("report line {line}: {detail}")]
    ReportLine { line: usize, detail: String },
    #[error(transparent)]
    Class(#[from] ClassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Csv,
    #[default]
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow<T = f64> {
    pub action_id: ActionId,
    pub name: String,
    pub ap: T,
}

/// Best and worst classes by AP, in the two-column layout of a results
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTable<T = f64> {
    /// Highest AP first.
    pub best: Vec<RankedRow<T>>,
    /// Lowest AP first, among classes with ground truth.
    pub worst: Vec<RankedRow<T>>,
    /// Classes without ground truth, by id.
    pub not_evaluable: Vec<(ActionId, String)>,
    pub k: usize,
}

/// Picks the `k` best and `k` worst evaluable classes.
///
/// AP ties are broken by ascending action id in both halves. When there are
/// more than `2k` evaluable classes the halves are disjoint.
pub fn rank_classes<T: Scalar>(
    report: &EvaluationReport<T>,
    vocab: &ActionVocabulary,
    k: usize,
) -> Result<RankedTable<T>, ReportError> {
    if k == 0 {
        return Err(ReportError::ZeroK);
    }
    let name = |id: ActionId| {
        vocab
            .name(id)
            .map(str::to_string)
            .ok_or(ReportError::UnknownAction(id))
    };
    let mut rows = Vec::new();
    let mut not_evaluable = Vec::new();
    for c in report.classes() {
        match (c.is_evaluable(), c.ap) {
            (true, Some(ap)) => rows.push(RankedRow {
                action_id: c.action_id,
                name: name(c.action_id)?,
                ap,
            }),
            _ => not_evaluable.push((c.action_id, name(c.action_id)?)),
        }
    }
    if rows.is_empty() {
        return Err(ReportError::NoEvaluableClasses);
    }

    let mut descending = rows.clone();
    descending.sort_by(|a, b| b.ap.order(&a.ap).then(a.action_id.cmp(&b.action_id)));
    let best: Vec<_> = descending.iter().take(k).cloned().collect();

    let mut pool = if rows.len() > 2 * k {
        descending[k..].to_vec()
    } else {
        rows
    };
    pool.sort_by(|a, b| a.ap.order(&b.ap).then(a.action_id.cmp(&b.action_id)));
    pool.truncate(k);

    Ok(RankedTable {
        best,
        worst: pool,
        not_evaluable,
        k,
    })
}

fn write_number<T: Scalar>(out: &mut String, value: T) {
    let _ = write!(out, "{}", value.to_f64());
}

fn emit_csv<T: Scalar>(
    report: &EvaluationReport<T>,
    vocab: &ActionVocabulary,
) -> Result<String, ReportError> {
    let mut out = String::new();
    out.push_str(REPORT_CSV_HEADER);
    out.push('\n');
    for c in report.classes() {
        let name = vocab
            .name(c.action_id)
            .ok_or(ReportError::UnknownAction(c.action_id))?;
        let _ = write!(out, "{},{},", c.action_id, name);
        if let Some(ap) = c.ap {
            ap.write_fixed(6, &mut out);
        }
        let _ = writeln!(out, ",{},{}", c.num_gt, c.num_det);
    }
    Ok(out)
}

fn emit_markdown<T: Scalar>(report: &EvaluationReport<T>, table: &RankedTable<T>) -> String {
    let config = report.config();
    let totals = report.totals();
    let mut out = String::new();
    out.push_str("# Action detection evaluation\n\n");
    out.push_str("mAP: ");
    if let Some(map) = report.map() {
        map.write_fixed(4, &mut out);
    }
    out.push_str("\n\n");
    out.push_str("- IoU threshold: ");
    write_number(&mut out, config.iou_threshold());
    let _ = writeln!(out, "\n- interpolation: {}", config.interpolation());
    out.push_str("- score floor: ");
    write_number(&mut out, config.score_floor());
    let _ = writeln!(
        out,
        "\n- evaluable classes: {} of {}\n",
        totals.evaluable_classes, totals.classes
    );

    let mut threshold = String::new();
    write_number(&mut threshold, config.iou_threshold());
    let _ = writeln!(
        out,
        "| Best category | AP@{threshold}IOU | Worst category | AP@{threshold}IOU |"
    );
    out.push_str("|:--|--:|:--|--:|\n");
    let rows = table.best.len().max(table.worst.len());
    for i in 0..rows {
        out.push('|');
        for half in [&table.best, &table.worst] {
            match half.get(i) {
                Some(row) => {
                    let _ = write!(out, " {} | ", row.name);
                    row.ap.write_fixed(4, &mut out);
                    out.push_str(" |");
                }
                None => out.push_str("  |  |"),
            }
        }
        out.push('\n');
    }
    if !table.not_evaluable.is_empty() {
        out.push_str("\nNot evaluable (no ground truth): ");
        let names: Vec<String> = table
            .not_evaluable
            .iter()
            .map(|(id, name)| format!("{name} ({id})"))
            .collect();
        out.push_str(&names.join(", "));
        out.push('\n');
    }
    out
}

/// Renders a report.
///
/// CSV lists every class as `action_id,name,ap,num_gt,num_det` with AP to
/// six decimals (empty when the class has no ground truth). Markdown gives
/// the mAP, the configuration and the best/worst table with AP to four
/// decimals.
pub fn emit_report<T: Scalar>(
    report: &EvaluationReport<T>,
    table: &RankedTable<T>,
    vocab: &ActionVocabulary,
    format: ReportFormat,
) -> Result<String, ReportError> {
    if report.totals().evaluable_classes == 0 {
        return Err(ReportError::NoEvaluableClasses);
    }
    match format {
        ReportFormat::Csv => emit_csv(report, vocab),
        ReportFormat::Markdown => Ok(emit_markdown(report, table)),
    }
}

/// `action_id,rank,recall,precision` rows for every retained curve.
pub fn emit_pr_points<T: Scalar>(report: &EvaluationReport<T>) -> Result<String, ReportError> {
    if !report.config().retain_curves() {
        return Err(ReportError::CurvesNotRetained);
    }
    let mut out = String::new();
    out.push_str(PR_CSV_HEADER);
    out.push('\n');
    for c in report.classes() {
        let Some(curve) = &c.curve else { continue };
        for (i, p) in curve.points().iter().enumerate() {
            let _ = write!(out, "{},{},", c.action_id, i + 1);
            p.recall.write_fixed(6, &mut out);
            out.push(',');
            p.precision.write_fixed(6, &mut out);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Reads a report CSV written by [`emit_report`] back into a report and the
/// vocabulary implied by its `name` column.
pub fn parse_report_csv(
    text: &str,
    config: EvalConfig<f64>,
) -> Result<(EvaluationReport<f64>, ActionVocabulary), ReportError> {
    let mut results = Vec::new();
    let mut classes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() || (i == 0 && line == REPORT_CSV_HEADER) {
            continue;
        }
        let bad = |detail: &str| ReportError::ReportLine {
            line: line_no,
            detail: detail.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        let [id, name, ap, num_gt, num_det] = fields[..] else {
            return Err(bad("expected 5 fields"));
        };
        let id: u32 = id.parse().map_err(|_| bad("bad action_id"))?;
        let ap = if ap.is_empty() {
            None
        } else {
            Some(
                f64::parse_decimal(ap)
                    .filter(|v| v.is_unit_interval())
                    .ok_or_else(|| bad("bad ap"))?,
            )
        };
        let num_gt: usize = num_gt.parse().map_err(|_| bad("bad num_gt"))?;
        let num_det: usize = num_det.parse().map_err(|_| bad("bad num_det"))?;
        if (num_gt > 0) != ap.is_some() {
            return Err(bad("ap must be present exactly when num_gt > 0"));
        }
        classes.push(ActionClass::new(id, name)?);
        results.push(ApResult {
            action_id: ActionId(id),
            ap,
            num_gt,
            num_det,
            curve: None,
        });
    }
    let vocab = ActionVocabulary::new(classes)?;
    Ok((EvaluationReport::from_results(results, config), vocab))
}
