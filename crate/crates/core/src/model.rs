//! Value types shared by every part of the toolkit: embedding and
//! probability matrices, metric results, and validation reports.
//!
//! All of these are immutable once constructed. Constructors validate, so a
//! value of one of these types always satisfies its invariants.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use ndarray::{concatenate, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on probability row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-4;

/// Free-form image source tag ("real", "text2img", "DB", ...).
///
/// Equality, ordering and hashing ignore case. `"real"` is the one reserved
/// label and marks reference imagery.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceLabel(String);

impl SourceLabel {
    pub const REAL: &'static str = "real";

    pub fn new(label: impl Into<String>) -> Self {
        SourceLabel(label.into())
    }

    pub fn real() -> Self {
        SourceLabel(Self::REAL.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.eq_ignore_ascii_case(Self::REAL)
    }

    fn folded(&self) -> String {
        self.0.to_lowercase()
    }
}

impl PartialEq for SourceLabel {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 || self.folded() == other.folded()
    }
}

impl Eq for SourceLabel {}

impl Hash for SourceLabel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.folded().hash(state);
    }
}

impl PartialOrd for SourceLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SourceLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.folded().cmp(&other.folded())
    }
}

impl fmt::Display for SourceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SourceLabel {
    fn from(s: &str) -> Self {
        SourceLabel::new(s)
    }
}

/// N×D feature vectors of one image set under one backbone.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    data: Array2<f64>,
    backbone_id: String,
    source_label: SourceLabel,
}

impl EmbeddingSet {
    pub fn new(
        data: Array2<f64>,
        backbone_id: impl Into<String>,
        source_label: impl Into<SourceLabel>,
    ) -> Result<Self> {
        let backbone_id = backbone_id.into();
        if backbone_id.is_empty() {
            return Err(Error::invalid("backbone_id must not be empty"));
        }
        let (n, d) = data.dim();
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!(
                "embedding set must be non-empty, got {n}x{d}"
            )));
        }
        if let Some(((i, j), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite entry {v} at ({i},{j})")));
        }
        Ok(EmbeddingSet {
            data,
            backbone_id,
            source_label: source_label.into(),
        })
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn backbone_id(&self) -> &str {
        &self.backbone_id
    }

    pub fn source_label(&self) -> &SourceLabel {
        &self.source_label
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    /// New set holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(Error::invalid(format!(
                "row {bad} out of range for {} rows",
                self.n()
            )));
        }
        EmbeddingSet::new(
            self.data.select(Axis(0), rows),
            self.backbone_id.clone(),
            self.source_label.clone(),
        )
    }

    /// Checks that two sets live in the same feature space.
    pub fn check_comparable(&self, other: &EmbeddingSet) -> Result<()> {
        if self.backbone_id != other.backbone_id {
            return Err(Error::BackboneMismatch {
                left: self.backbone_id.clone(),
                right: other.backbone_id.clone(),
            });
        }
        if self.d() != other.d() {
            return Err(Error::DimensionMismatch {
                left: self.d(),
                right: other.d(),
            });
        }
        Ok(())
    }
}

/// Row-concatenates two embedding sets of the same backbone, `a` first.
///
/// The merged label is `a`'s when both agree, otherwise `"a+b"`.
pub fn merge_sets(a: &EmbeddingSet, b: &EmbeddingSet) -> Result<EmbeddingSet> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            left: a.d(),
            right: b.d(),
        });
    }
    a.check_comparable(b)?;
    let data = concatenate(Axis(0), &[a.data.view(), b.data.view()])
        .expect("column counts checked above");
    let label = if a.source_label == b.source_label {
        a.source_label.clone()
    } else {
        SourceLabel::new(format!("{}+{}", a.source_label, b.source_label))
    };
    EmbeddingSet::new(data, a.backbone_id.clone(), label)
}

/// N×C class-probability rows p(y|x_i).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySet {
    probs: Array2<f64>,
    backbone_id: String,
    source_label: SourceLabel,
}

impl ProbabilitySet {
    pub fn new(
        probs: Array2<f64>,
        backbone_id: impl Into<String>,
        source_label: impl Into<SourceLabel>,
    ) -> Result<Self> {
        let backbone_id = backbone_id.into();
        if backbone_id.is_empty() {
            return Err(Error::invalid("backbone_id must not be empty"));
        }
        let report = validate_probability_rows(probs.view());
        if !report.is_ok() {
            return Err(Error::InvalidProbabilities(report));
        }
        Ok(ProbabilitySet {
            probs,
            backbone_id,
            source_label: source_label.into(),
        })
    }

    pub fn probs(&self) -> ArrayView2<'_, f64> {
        self.probs.view()
    }

    pub fn backbone_id(&self) -> &str {
        &self.backbone_id
    }

    pub fn source_label(&self) -> &SourceLabel {
        &self.source_label
    }

    pub fn n(&self) -> usize {
        self.probs.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.probs.ncols()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(Error::invalid(format!(
                "row {bad} out of range for {} rows",
                self.n()
            )));
        }
        ProbabilitySet::new(
            self.probs.select(Axis(0), rows),
            self.backbone_id.clone(),
            self.source_label.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty { rows: usize, cols: usize },
    TooFewClasses { classes: usize },
    NonFinite { row: usize, col: usize },
    OutOfRange { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty { rows, cols } => write!(f, "matrix is empty ({rows}x{cols})"),
            Violation::TooFewClasses { classes } => {
                write!(f, "need at least 2 classes, got {classes}")
            }
            Violation::NonFinite { row, col } => write!(f, "non-finite entry at ({row},{col})"),
            Violation::OutOfRange { row, col, value } => {
                write!(f, "entry {value} at ({row},{col}) outside [0,1]")
            }
            Violation::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
        }
    }
}

/// Outcome of validating a probability matrix. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reports every range, finiteness and row-sum violation of a candidate
/// probability matrix. Never fails.
pub fn validate_probability_rows(probs: ArrayView2<'_, f64>) -> ValidationReport {
    let mut violations = Vec::new();
    let (rows, cols) = probs.dim();
    if rows == 0 || cols == 0 {
        violations.push(Violation::Empty { rows, cols });
        return ValidationReport { violations };
    }
    if cols < 2 {
        violations.push(Violation::TooFewClasses { classes: cols });
    }
    for (i, row) in probs.outer_iter().enumerate() {
        let mut finite = true;
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                finite = false;
                violations.push(Violation::NonFinite { row: i, col: j });
            } else if !(0.0..=1.0).contains(&v) {
                violations.push(Violation::OutOfRange {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
        if finite {
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                violations.push(Violation::RowSum { row: i, sum });
            }
        }
    }
    ValidationReport { violations }
}

/// Direction in which a metric improves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Better {
    Higher,
    Lower,
}

impl Better {
    pub fn arrow(self) -> &'static str {
        match self {
            Better::Higher => "↑",
            Better::Lower => "↓",
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn prefers(self, a: f64, b: f64) -> bool {
        match self {
            Better::Higher => a > b,
            Better::Lower => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricName {
    IS,
    #[serde(rename = "IS_star")]
    IsStar,
    FID,
    #[serde(rename = "FID_star")]
    FidStar,
    FCD,
    KID,
    Precision,
    Recall,
}

impl MetricName {
    /// All metrics in report column order.
    pub const ALL: [MetricName; 8] = [
        MetricName::IS,
        MetricName::IsStar,
        MetricName::FID,
        MetricName::FidStar,
        MetricName::FCD,
        MetricName::KID,
        MetricName::Precision,
        MetricName::Recall,
    ];

    pub fn better(self) -> Better {
        match self {
            MetricName::IS | MetricName::IsStar | MetricName::Precision | MetricName::Recall => {
                Better::Higher
            }
            MetricName::FID | MetricName::FidStar | MetricName::FCD | MetricName::KID => {
                Better::Lower
            }
        }
    }

    /// Machine name, as used on the command line and in JSON.
    pub fn key(self) -> &'static str {
        match self {
            MetricName::IS => "IS",
            MetricName::IsStar => "IS_star",
            MetricName::FID => "FID",
            MetricName::FidStar => "FID_star",
            MetricName::FCD => "FCD",
            MetricName::KID => "KID",
            MetricName::Precision => "Precision",
            MetricName::Recall => "Recall",
        }
    }

    /// Human-facing column title.
    pub fn title(self) -> &'static str {
        match self {
            MetricName::IsStar => "IS*",
            MetricName::FidStar => "FID*",
            other => other.key(),
        }
    }

    pub fn parse(s: &str) -> Option<MetricName> {
        let s = s.trim();
        MetricName::ALL
            .into_iter()
            .find(|m| m.key().eq_ignore_ascii_case(s) || m.title().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

/// A single computed score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub metric_name: MetricName,
    pub value: f64,
    /// Standard deviation across splits or subsets, when the metric has one.
    pub dispersion: Option<f64>,
    pub better: Better,
    pub n_real: Option<usize>,
    pub n_gen: usize,
    pub backbone_id: String,
    pub seed: Option<u64>,
}

impl MetricResult {
    pub fn new(metric_name: MetricName, value: f64, n_gen: usize, backbone_id: &str) -> Self {
        MetricResult {
            metric_name,
            value,
            dispersion: None,
            better: metric_name.better(),
            n_real: None,
            n_gen,
            backbone_id: backbone_id.to_owned(),
            seed: None,
        }
    }

    pub fn with_dispersion(mut self, dispersion: f64) -> Self {
        self.dispersion = Some(dispersion);
        self
    }

    pub fn with_n_real(mut self, n_real: usize) -> Self {
        self.n_real = Some(n_real);
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }
}
