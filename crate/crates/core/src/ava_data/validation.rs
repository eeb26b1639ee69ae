use std::collections::BTreeMap;
use std::fmt;

use super::types::ActionId;

/// Why an input row was not turned into a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    MalformedField,
    CoordinateOutOfRange,
    DegenerateBox,
    UnknownAction,
    ScoreOutOfRange,
    Duplicate,
}

impl RejectReason {
    pub const ALL: [RejectReason; 6] = [
        RejectReason::MalformedField,
        RejectReason::CoordinateOutOfRange,
        RejectReason::DegenerateBox,
        RejectReason::UnknownAction,
        RejectReason::ScoreOutOfRange,
        RejectReason::Duplicate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::MalformedField => "malformed field",
            RejectReason::CoordinateOutOfRange => "coordinate out of range",
            RejectReason::DegenerateBox => "degenerate box",
            RejectReason::UnknownAction => "unknown action id",
            RejectReason::ScoreOutOfRange => "score out of range",
            RejectReason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected row, located by its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    pub line: usize,
    pub reason: RejectReason,
    pub detail: String,
}

impl fmt::Display for RowIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.reason, self.detail)
    }
}

/// Row accounting for one parsed file.
///
/// `parsed_rows + rejected_total() == total_rows` holds at every point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub total_rows: usize,
    pub parsed_rows: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
    pub per_class: BTreeMap<ActionId, usize>,
    /// The first few rejections, for messages.
    pub issues: Vec<RowIssue>,
}

impl ValidationReport {
    pub const MAX_ISSUES: usize = 10;

    pub fn rejected_total(&self) -> usize {
        self.rejected.values().sum()
    }

    pub fn rejected_for(&self, reason: RejectReason) -> usize {
        self.rejected.get(&reason).copied().unwrap_or(0)
    }

    pub(crate) fn accept(&mut self, action: ActionId) {
        self.total_rows += 1;
        self.parsed_rows += 1;
        *self.per_class.entry(action).or_default() += 1;
    }

    pub(crate) fn reject(&mut self, issue: RowIssue) {
        self.total_rows += 1;
        *self.rejected.entry(issue.reason).or_default() += 1;
        if self.issues.len() < Self::MAX_ISSUES {
            self.issues.push(issue);
        }
    }

    /// Reclassifies rows that parsed fine but were dropped as exact
    /// duplicates while indexing.
    pub fn record_duplicates(&mut self, per_class: &BTreeMap<ActionId, usize>) {
        for (&action, &n) in per_class {
            if n == 0 {
                continue;
            }
            self.parsed_rows -= n;
            *self.rejected.entry(RejectReason::Duplicate).or_default() += n;
            if let Some(count) = self.per_class.get_mut(&action) {
                *count -= n;
                if *count == 0 {
                    self.per_class.remove(&action);
                }
            }
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.total_rows)?;
        writeln!(f, "parsed: {}", self.parsed_rows)?;
        writeln!(f, "rejected: {}", self.rejected_total())?;
        for reason in RejectReason::ALL {
            let n = self.rejected_for(reason);
            if n > 0 {
                writeln!(f, "  {reason}: {n}")?;
            }
        }
        writeln!(f, "classes: {}", self.per_class.len())?;
        for issue in &self.issues {
            writeln!(f, "  {issue}")?;
        }
        Ok(())
    }
}
