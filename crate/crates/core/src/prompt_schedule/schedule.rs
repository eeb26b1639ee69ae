use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::PromptError;

/// Keyframe window and sampling step, in whole seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleConfig {
    start_s: u32,
    end_s: u32,
    interval_s: u32,
}

impl ScheduleConfig {
    pub const DEFAULT_START_S: u32 = 902;
    pub const DEFAULT_END_S: u32 = 1798;

    pub fn new(start_s: u32, end_s: u32, interval_s: u32) -> Result<Self, PromptError> {
        if start_s > end_s || interval_s == 0 {
            return Err(PromptError::InvalidSchedule {
                start_s,
                end_s,
                interval_s,
            });
        }
        Ok(Self {
            start_s,
            end_s,
            interval_s,
        })
    }

    pub fn start_s(&self) -> u32 {
        self.start_s
    }

    pub fn end_s(&self) -> u32 {
        self.end_s
    }

    pub fn interval_s(&self) -> u32 {
        self.interval_s
    }

    /// Keyframes per video: `(end - start) / interval + 1`.
    pub fn count(&self) -> usize {
        ((self.end_s - self.start_s) / self.interval_s) as usize + 1
    }

    pub fn timestamps(&self) -> impl Iterator<Item = u32> {
        (self.start_s..=self.end_s).step_by(self.interval_s as usize)
    }
}

impl Default for ScheduleConfig {
    /// 1 Hz over the standard annotated segment, 902 s to 1798 s.
    fn default() -> Self {
        Self::new(Self::DEFAULT_START_S, Self::DEFAULT_END_S, 1).expect("valid defaults")
    }
}

/// Timestamps to sample, per video.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyframeSchedule {
    videos: BTreeMap<String, Vec<u32>>,
}

impl KeyframeSchedule {
    pub fn videos(&self) -> &BTreeMap<String, Vec<u32>> {
        &self.videos
    }

    pub fn timestamps(&self, video_id: &str) -> Option<&[u32]> {
        self.videos.get(video_id).map(Vec::as_slice)
    }

    pub fn total_keyframes(&self) -> usize {
        self.videos.values().map(Vec::len).sum()
    }

    /// `video_id,timestamp` rows, videos in lexicographic order, timestamps
    /// ascending and zero-padded to four digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.total_keyframes() * 16);
        for (video, stamps) in &self.videos {
            for ts in stamps {
                let _ = writeln!(out, "{video},{ts:04}");
            }
        }
        out
    }
}

pub fn build_schedule<S: AsRef<str>>(
    video_ids: &[S],
    config: &ScheduleConfig,
) -> Result<KeyframeSchedule, PromptError> {
    if video_ids.is_empty() {
        return Err(PromptError::NoVideos);
    }
    let stamps: Vec<u32> = config.timestamps().collect();
    let mut videos = BTreeMap::new();
    for id in video_ids {
        let id = id.as_ref();
        if id.is_empty() || id.contains([',', '\n', '\r']) {
            return Err(PromptError::InvalidVideoId(id.to_string()));
        }
        if videos.insert(id.to_string(), stamps.clone()).is_some() {
            return Err(PromptError::DuplicateVideo(id.to_string()));
        }
    }
    Ok(KeyframeSchedule { videos })
}
