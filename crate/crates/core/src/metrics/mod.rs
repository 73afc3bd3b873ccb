//! The metric families: Inception score, Fréchet distance, kernel
//! distance, and k-NN precision/recall.
//!
//! The starred variants are the same formulas evaluated in a different
//! feature space. Which name a score carries is decided by
//! [`BackboneNaming`], a configurable table from backbone ids to
//! [`FeatureSpace`]s.

mod frechet;
mod inception;
mod kid;
mod prc;
mod suite;

pub use frechet::{frechet_distance, frechet_value, frechet_value_with, FRECHET_CLAMP_TOL};
pub use inception::{inception_score, inception_score_splits, SplitSpec};
pub use kid::{kid, kid_subset_estimate, kid_subset_values, KidSpec, PolynomialKernel};
pub use prc::{coverage_fraction, knn_radii_sq, precision_recall, PrSpec};
pub use suite::{evaluate_suite, SetBundle, Skipped, SuiteOutcome, SuiteSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MetricName;

/// The three feature spaces scores are computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSpace {
    /// Generic pretrained classifier.
    Base,
    /// Classifier fine-tuned on the target imagery domain.
    DomainFinetuned,
    /// CLIP image encoder.
    Clip,
}

impl FeatureSpace {
    pub const ALL: [FeatureSpace; 3] = [
        FeatureSpace::Base,
        FeatureSpace::DomainFinetuned,
        FeatureSpace::Clip,
    ];

    /// Name of the Inception-score variant in this space, if the space has
    /// class probabilities at all.
    pub fn inception_metric(self) -> Option<MetricName> {
        match self {
            FeatureSpace::Base => Some(MetricName::IS),
            FeatureSpace::DomainFinetuned => Some(MetricName::IsStar),
            FeatureSpace::Clip => None,
        }
    }

    pub fn frechet_metric(self) -> MetricName {
        match self {
            FeatureSpace::Base => MetricName::FID,
            FeatureSpace::DomainFinetuned => MetricName::FidStar,
            FeatureSpace::Clip => MetricName::FCD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamingRule {
    /// Matches backbone ids equal to, or starting with, this prefix
    /// (case-insensitive).
    pub prefix: String,
    pub space: FeatureSpace,
}

/// Maps backbone ids to feature spaces. The longest matching prefix wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackboneNaming {
    pub rules: Vec<NamingRule>,
}

impl Default for BackboneNaming {
    fn default() -> Self {
        let rule = |prefix: &str, space| NamingRule {
            prefix: prefix.to_owned(),
            space,
        };
        BackboneNaming {
            rules: vec![
                rule("base", FeatureSpace::Base),
                rule("inception", FeatureSpace::Base),
                rule("domain", FeatureSpace::DomainFinetuned),
                rule("clip", FeatureSpace::Clip),
            ],
        }
    }
}

impl BackboneNaming {
    pub fn from_json(text: &str) -> Result<Self> {
        let naming: BackboneNaming = serde_json::from_str(text)?;
        if naming.rules.iter().any(|r| r.prefix.is_empty()) {
            return Err(Error::invalid("naming rule with empty prefix"));
        }
        Ok(naming)
    }

    pub fn space_of(&self, backbone_id: &str) -> Option<FeatureSpace> {
        let id = backbone_id.to_lowercase();
        self.rules
            .iter()
            .filter(|r| id.starts_with(&r.prefix.to_lowercase()))
            .max_by_key(|r| r.prefix.len())
            .map(|r| r.space)
    }

    pub(crate) fn require_space(&self, backbone_id: &str) -> Result<FeatureSpace> {
        self.space_of(backbone_id).ok_or_else(|| {
            Error::invalid(format!("no naming rule matches backbone {backbone_id:?}"))
        })
    }
}

/// Population mean and standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
