//! Sample-size sensitivity: recompute metrics on seeded subsets of
//! increasing size.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{evaluate_suite, SetBundle, SuiteSpec};
use crate::model::MetricResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub sizes: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub size: usize,
    pub repeat: usize,
    pub result: MetricResult,
}

/// For every size and repeat, draws `size` rows without replacement from the
/// generated bundle (and from the real bundle, when present) and evaluates
/// the suite on them. Rows are emitted in (size, repeat, metric) order.
pub fn sweep(
    real: &SetBundle,
    gen: &SetBundle,
    suite: &SuiteSpec,
    spec: &SweepSpec,
) -> Result<Vec<SweepRow>> {
    let gen_rows = gen
        .rows()?
        .ok_or_else(|| Error::invalid("generated bundle is empty"))?;
    let real_rows = real.rows()?;
    if spec.repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    for &size in &spec.sizes {
        let available = real_rows.map_or(gen_rows, |r| r.min(gen_rows));
        if size > available {
            return Err(Error::invalid(format!(
                "sample size {size} exceeds the {available} available rows"
            )));
        }
        if size == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    for &size in &spec.sizes {
        for repeat in 0..spec.repeats {
            let g = gen.select_rows(&index::sample(&mut rng, gen_rows, size).into_vec())?;
            let r = match real_rows {
                Some(n) => real.select_rows(&index::sample(&mut rng, n, size).into_vec())?,
                None => SetBundle::default(),
            };
            let outcome = evaluate_suite(&r, &g, suite)?;
            out.extend(outcome.results.into_iter().map(|result| SweepRow {
                size,
                repeat,
                result,
            }));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    size: usize,
    repeat: usize,
    model: &'a str,
    metric: &'static str,
    value: f64,
    dispersion: Option<f64>,
    n_real: Option<usize>,
    n_gen: usize,
    backbone_id: &'a str,
    seed: Option<u64>,
}

/// Long-form CSV, one line per (size, repeat, metric).
pub fn sweep_csv(model: &str, rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        let r = &row.result;
        w.serialize(CsvRow {
            size: row.size,
            repeat: row.repeat,
            model,
            metric: r.metric_name.key(),
            value: r.value,
            dispersion: r.dispersion,
            n_real: r.n_real,
            n_gen: r.n_gen,
            backbone_id: &r.backbone_id,
            seed: r.seed,
        })
        .expect("in-memory write");
    }
    if rows.is_empty() {
        w.write_record([
            "size",
            "repeat",
            "model",
            "metric",
            "value",
            "dispersion",
            "n_real",
            "n_gen",
            "backbone_id",
            "seed",
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
