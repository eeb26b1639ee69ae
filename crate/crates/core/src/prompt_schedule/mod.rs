//! Question bank and keyframe schedule that drive model inference.

mod bank;
mod gerund;
mod schedule;

use thiserror::Error;

use crate::ava_data::ActionId;

pub use bank::{build_prompt_bank, PromptBank, PromptTemplate, DEFAULT_PATTERN, PLACEHOLDER};
pub use gerund::{ava_gerund_table, gerundize, AVA_GERUNDS};
pub use schedule::{build_schedule, KeyframeSchedule, ScheduleConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("cannot form a gerund from an empty phrase")]
    EmptyPhrase,
    #[error("pattern {0:?} must contain {{action}} exactly once")]
    Placeholder(String),
    #[error("question {0:?} must end with '?'")]
    MissingQuestionMark(String),
    #[error("override for {0:?} matches no vocabulary class")]
    UnknownOverride(String),
    #[error("actions {first} and {second} share the question {question:?}")]
    DuplicateQuestion {
        question: String,
        first: ActionId,
        second: ActionId,
    },
    #[error("question for action {action} contains a comma: {question:?}")]
    CommaInQuestion { action: ActionId, question: String },
    #[error("prompt bank line {line}: cannot parse {text:?}")]
    BankLine { line: usize, text: String },
    #[error("invalid schedule: start {start_s}, end {end_s}, interval {interval_s}")]
    InvalidSchedule {
        start_s: u32,
        end_s: u32,
        interval_s: u32,
    },
    #[error("schedule needs at least one video")]
    NoVideos,
    #[error("video id {0:?} listed twice")]
    DuplicateVideo(String),
    #[error("video id {0:?} is empty or contains a comma")]
    InvalidVideoId(String),
}
