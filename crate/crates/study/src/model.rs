use std::fmt;

use serde::{Deserialize, Serialize};

pub const DEFAULT_LEASE_SECONDS: u64 = 300;

fn default_lease() -> u64 {
    DEFAULT_LEASE_SECONDS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub image_id: String,
    /// Relative to the service's image root.
    pub image_path: String,
    /// `"real"` or the generating method. Never shown to annotators.
    pub true_source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyDefinition {
    pub study_id: String,
    pub roster: Vec<RosterEntry>,
    pub annotators: Vec<String>,
    #[serde(default = "default_lease")]
    pub lease_seconds: u64,
    /// Seed for the serving order.
    #[serde(default)]
    pub seed: u64,
    /// Maximum labels per annotator; unlimited when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quota_per_annotator: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "real" => Some(Label::Real),
            "fake" => Some(Label::Fake),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Real => "real",
            Label::Fake => "fake",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub study_id: String,
    pub image_id: String,
    pub user_id: String,
    pub label: Label,
    /// Milliseconds since the Unix epoch.
    pub submitted_at: u64,
}

/// Annotator-facing task. Carries no source information.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NextTask {
    Task {
        image_id: String,
        image_url: String,
        lease_expires_at: u64,
        progress: Progress,
    },
    /// Every image is labeled, or this annotator reached their quota.
    Exhausted { progress: Progress },
    /// Remaining images are leased to other annotators.
    Wait {
        retry_after_seconds: u64,
        progress: Progress,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub labeled: usize,
    pub total: usize,
    /// Labels submitted by the requesting annotator.
    pub mine: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acknowledgment {
    pub study_id: String,
    pub image_id: String,
    pub label: Label,
    /// True when this repeated an already stored identical submission.
    pub duplicate: bool,
    pub annotated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceTally {
    pub source: String,
    pub roster_count: usize,
    pub predicted_real: usize,
    pub predicted_fake: usize,
    pub annotated: usize,
    pub missing: usize,
    /// `predicted_real / annotated`; `None` before any label.
    pub success_rate: Option<f64>,
}

impl SourceTally {
    /// Success rate in whole percent, rounded half up.
    pub fn success_percent(&self) -> Option<u64> {
        if self.annotated == 0 {
            return None;
        }
        let (real, total) = (self.predicted_real as u64, self.annotated as u64);
        Some((200 * real + total) / (2 * total))
    }

    pub fn success_display(&self) -> String {
        self.success_percent()
            .map_or_else(|| "—".to_owned(), |p| format!("{p}%"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResults {
    pub study_id: String,
    /// In order of first appearance in the roster.
    pub sources: Vec<SourceTally>,
    pub total_annotated: usize,
    pub total_images: usize,
}

impl StudyResults {
    pub fn source(&self, name: &str) -> Option<&SourceTally> {
        let key = geneval_core::SourceLabel::new(name);
        self.sources
            .iter()
            .find(|t| geneval_core::SourceLabel::new(t.source.as_str()) == key)
    }

    /// Markdown table: one column per source, rows for the two label
    /// counts and the success rate.
    pub fn render_markdown(&self) -> String {
        let mut out = String::from("| Method |");
        for t in &self.sources {
            out.push_str(&format!(" {} |", t.source));
        }
        out.push_str("\n| --- |");
        for _ in &self.sources {
            out.push_str(" ---: |");
        }
        out.push('\n');
        let mut row = |title: &str, cell: &dyn Fn(&SourceTally) -> String| {
            out.push_str(&format!("| {title} |"));
            for t in &self.sources {
                out.push_str(&format!(" {} |", cell(t)));
            }
            out.push('\n');
        };
        row("Predicted as \"Real\"", &|t| t.predicted_real.to_string());
        row("Predicted as \"Fake\"", &|t| t.predicted_fake.to_string());
        row("Missing", &|t| t.missing.to_string());
        row("Success Rate", &|t| t.success_display());
        out.push_str(&format!(
            "\n{} of {} images annotated\n",
            self.total_annotated, self.total_images
        ));
        out
    }
}
