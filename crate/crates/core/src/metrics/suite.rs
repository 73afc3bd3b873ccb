use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    frechet_distance, inception_score, kid, precision_recall, BackboneNaming, FeatureSpace,
    KidSpec, PrSpec, SplitSpec,
};
use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, MetricName, MetricResult, ProbabilitySet};

/// Embeddings and probabilities of one image set, one entry per backbone.
#[derive(Debug, Clone, Default)]
pub struct SetBundle {
    pub embeddings: Vec<EmbeddingSet>,
    pub probabilities: Vec<ProbabilitySet>,
}

impl SetBundle {
    pub fn is_empty(&self) -> bool {
        self.embeddings.is_empty() && self.probabilities.is_empty()
    }

    /// Common row count, or an error when the sets disagree.
    pub fn rows(&self) -> Result<Option<usize>> {
        let mut sizes = self
            .embeddings
            .iter()
            .map(|e| (e.backbone_id(), e.n()))
            .chain(self.probabilities.iter().map(|p| (p.backbone_id(), p.n())));
        let Some((first_id, first)) = sizes.next() else {
            return Ok(None);
        };
        for (id, n) in sizes {
            if n != first {
                return Err(Error::invalid(format!(
                    "conflicting set sizes within a bundle: {first_id:?} has {first} rows, {id:?} has {n}"
                )));
            }
        }
        Ok(Some(first))
    }

    /// Same rows (by index) of every set in the bundle.
    pub fn select_rows(&self, rows: &[usize]) -> Result<SetBundle> {
        Ok(SetBundle {
            embeddings: self
                .embeddings
                .iter()
                .map(|e| e.select_rows(rows))
                .collect::<Result<_>>()?,
            probabilities: self
                .probabilities
                .iter()
                .map(|p| p.select_rows(rows))
                .collect::<Result<_>>()?,
        })
    }

    fn embeddings_by_space(
        &self,
        naming: &BackboneNaming,
    ) -> Result<BTreeMap<FeatureSpace, &EmbeddingSet>> {
        let mut map = BTreeMap::new();
        for e in &self.embeddings {
            let Some(space) = naming.space_of(e.backbone_id()) else {
                continue;
            };
            if map.insert(space, e).is_some() {
                return Err(Error::invalid(format!(
                    "two embedding sets map to the {space:?} feature space"
                )));
            }
        }
        Ok(map)
    }

    fn probabilities_by_space(
        &self,
        naming: &BackboneNaming,
    ) -> Result<BTreeMap<FeatureSpace, &ProbabilitySet>> {
        let mut map = BTreeMap::new();
        for p in &self.probabilities {
            let Some(space) = naming.space_of(p.backbone_id()) else {
                continue;
            };
            if map.insert(space, p).is_some() {
                return Err(Error::invalid(format!(
                    "two probability sets map to the {space:?} feature space"
                )));
            }
        }
        Ok(map)
    }
}

/// Parameters for a full evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSpec {
    /// Metrics to compute; empty means all.
    pub metrics: Vec<MetricName>,
    pub split: SplitSpec,
    pub kid: KidSpec,
    pub pr: PrSpec,
    pub naming: BackboneNaming,
    /// Feature space KID and precision/recall are computed in.
    pub kid_pr_space: FeatureSpace,
    pub frechet_diagonal_offset: f64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            metrics: Vec::new(),
            split: SplitSpec::default(),
            kid: KidSpec::default(),
            pr: PrSpec::default(),
            naming: BackboneNaming::default(),
            kid_pr_space: FeatureSpace::Base,
            frechet_diagonal_offset: 0.0,
        }
    }
}

impl SuiteSpec {
    fn wants(&self, metric: MetricName) -> bool {
        self.metrics.is_empty() || self.metrics.contains(&metric)
    }
}

/// A requested metric that could not be computed from the given inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub metric: MetricName,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub results: Vec<MetricResult>,
    pub skipped: Vec<Skipped>,
}

/// Computes every requested metric whose inputs are present and records a
/// notice for each one that is not. `real` may be empty, in which case only
/// the Inception-score family is available.
pub fn evaluate_suite(real: &SetBundle, gen: &SetBundle, spec: &SuiteSpec) -> Result<SuiteOutcome> {
    if gen.is_empty() {
        return Err(Error::invalid("generated bundle is empty"));
    }
    gen.rows()?;
    real.rows()?;
    let naming = &spec.naming;
    let gen_emb = gen.embeddings_by_space(naming)?;
    let real_emb = real.embeddings_by_space(naming)?;
    let gen_probs = gen.probabilities_by_space(naming)?;

    let skip = |metric, reason: String| Skipped { metric, reason };
    let mut results = Vec::new();
    let mut skipped = Vec::new();

    for space in [FeatureSpace::Base, FeatureSpace::DomainFinetuned] {
        let metric = space.inception_metric().expect("classifier spaces");
        if !spec.wants(metric) {
            continue;
        }
        match gen_probs.get(&space) {
            Some(p) => results.push(inception_score(p, &spec.split, naming)?),
            None => skipped.push(skip(metric, format!("no {space:?} probabilities"))),
        }
    }

    for space in FeatureSpace::ALL {
        let metric = space.frechet_metric();
        if !spec.wants(metric) {
            continue;
        }
        match (real_emb.get(&space), gen_emb.get(&space)) {
            (Some(r), Some(g)) => results.push(frechet_distance(
                r,
                g,
                naming,
                spec.frechet_diagonal_offset,
            )?),
            (None, _) => skipped.push(skip(metric, "no real embeddings".into())),
            (_, None) => {
                skipped.push(skip(metric, format!("no generated {space:?} embeddings")))
            }
        }
    }

    let space = spec.kid_pr_space;
    let pair = match (real_emb.get(&space), gen_emb.get(&space)) {
        (Some(r), Some(g)) => Ok((*r, *g)),
        (None, _) => Err("no real embeddings".to_owned()),
        (_, None) => Err(format!("no generated {space:?} embeddings")),
    };
    if spec.wants(MetricName::KID) {
        match &pair {
            Ok((r, g)) => results.push(kid(r, g, &spec.kid)?),
            Err(reason) => skipped.push(skip(MetricName::KID, reason.clone())),
        }
    }
    let want_p = spec.wants(MetricName::Precision);
    let want_r = spec.wants(MetricName::Recall);
    if want_p || want_r {
        match &pair {
            Ok((r, g)) => {
                let (p, rc) = precision_recall(r, g, &spec.pr)?;
                if want_p {
                    results.push(p);
                }
                if want_r {
                    results.push(rc);
                }
            }
            Err(reason) => {
                for (wanted, metric) in [(want_p, MetricName::Precision), (want_r, MetricName::Recall)]
                {
                    if wanted {
                        skipped.push(skip(metric, reason.clone()));
                    }
                }
            }
        }
    }

    results.sort_by_key(|r| r.metric_name);
    Ok(SuiteOutcome { results, skipped })
}
