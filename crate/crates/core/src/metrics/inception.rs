use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{mean_std, BackboneNaming};
use crate::error::{Error, Result};
use crate::model::{MetricResult, ProbabilitySet};

/// How rows are partitioned for the Inception score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub split_count: usize,
    /// Shuffle rows with this seed before splitting; `None` keeps input order.
    pub seed: Option<u64>,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            split_count: 10,
            seed: None,
        }
    }
}

/// Inception score of `p`, named after the feature space of its backbone.
///
/// The value is the mean over splits and the dispersion the population
/// standard deviation across splits.
pub fn inception_score(
    p: &ProbabilitySet,
    spec: &SplitSpec,
    naming: &BackboneNaming,
) -> Result<MetricResult> {
    let space = naming.require_space(p.backbone_id())?;
    let metric = space.inception_metric().ok_or_else(|| {
        Error::invalid(format!(
            "backbone {:?} has no Inception-score variant",
            p.backbone_id()
        ))
    })?;
    let scores = inception_score_splits(p, spec)?;
    let (mean, std) = mean_std(&scores);
    Ok(MetricResult::new(metric, mean, p.n(), p.backbone_id())
        .with_dispersion(std)
        .with_seed(spec.seed))
}

/// Per-split scores `exp(mean_i KL(p(y|x_i) ‖ p̄(y)))`.
///
/// Splits are contiguous; when N is not a multiple of the split count the
/// first `N mod k` splits get one extra row.
pub fn inception_score_splits(p: &ProbabilitySet, spec: &SplitSpec) -> Result<Vec<f64>> {
    let n = p.n();
    let k = spec.split_count;
    if k == 0 {
        return Err(Error::invalid("split_count must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "split_count {k} exceeds the {n} available rows"
        )));
    }
    if n / k < 2 {
        return Err(Error::invalid(format!(
            "{n} rows in {k} splits leaves a split smaller than 2 rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = spec.seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let probs = p.probs();
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    let mut scores = Vec::with_capacity(k);
    for s in 0..k {
        let len = base + usize::from(s < extra);
        scores.push(split_score(probs, &order[start..start + len]));
        start += len;
    }
    Ok(scores)
}

/// Score of one split. Sums run over sorted terms so the result does not
/// depend on row order within the split.
fn split_score(probs: ArrayView2<'_, f64>, rows: &[usize]) -> f64 {
    let classes = probs.ncols();
    let m = rows.len() as f64;
    let mut column = Vec::with_capacity(rows.len());
    let marginal: Vec<f64> = (0..classes)
        .map(|c| {
            column.clear();
            column.extend(rows.iter().map(|&r| probs[(r, c)]));
            column.sort_unstable_by(f64::total_cmp);
            // offset by the minimum so a constant column averages exactly
            let low = column[0];
            low + column.iter().map(|v| v - low).sum::<f64>() / m
        })
        .collect();

    let mut kl: Vec<f64> = rows
        .iter()
        .map(|&r| {
            probs
                .row(r)
                .iter()
                .zip(&marginal)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| p * (p.ln() - q.ln()))
                .sum()
        })
        .collect();
    let mean_kl = sorted_sum(&mut kl) / m;
    // 0 ≤ mean KL ≤ ln C holds exactly; clamp away round-off
    let max_kl = (classes as f64).ln();
    mean_kl
        .clamp(0.0, max_kl)
        .exp()
        .clamp(1.0, classes as f64)
}

fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}
