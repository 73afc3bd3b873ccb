//! `compute` and `sweep`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use geneval_core::io::{render_report, ModelRow, ReportFormat};
use geneval_core::sweep::{sweep, sweep_csv, SweepSpec};
use geneval_core::{
    evaluate_suite, BackboneNaming, KidSpec, MetricName, PrSpec, SetBundle, SplitSpec, SuiteSpec,
};

use crate::inputs::{load_inputs, InputSpec};

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Real-data file, repeatable.
    #[arg(long = "real", value_name = "BACKBONE=PATH")]
    pub real: Vec<InputSpec>,
    /// Generated-data file, repeatable. Files are grouped into models by
    /// their source label.
    #[arg(long = "gen", value_name = "BACKBONE=PATH", required = true)]
    pub gen: Vec<InputSpec>,
    /// Comma-separated metric names, or "all".
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub metrics: Vec<String>,
    /// JSON table mapping backbone-id prefixes to feature spaces.
    #[arg(long, value_name = "PATH")]
    pub naming: Option<PathBuf>,
    /// Inception-score splits.
    #[arg(long, default_value_t = 10)]
    pub splits: usize,
    /// Rows per KID subset [default: min(1000, n_real, n_gen)].
    #[arg(long)]
    pub kid_subset_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub kid_subsets: usize,
    /// Neighborhood size for precision/recall.
    #[arg(long, default_value_t = 3)]
    pub pr_k: usize,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Added to both covariance diagonals before the Fréchet distance.
    #[arg(long, default_value_t = 0.0)]
    pub frechet_offset: f64,
}

impl InputArgs {
    fn suite(&self) -> Result<SuiteSpec> {
        let mut metrics = Vec::new();
        for name in &self.metrics {
            if name.eq_ignore_ascii_case("all") {
                metrics.clear();
                break;
            }
            match MetricName::parse(name) {
                Some(m) => metrics.push(m),
                None => bail!("--metrics: unknown metric {name:?}"),
            }
        }
        let naming = match &self.naming {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("--naming {}", path.display()))?;
                BackboneNaming::from_json(&text)
                    .with_context(|| format!("--naming {}", path.display()))?
            }
            None => BackboneNaming::default(),
        };
        if self.splits == 0 {
            bail!("--splits must be at least 1");
        }
        if self.pr_k == 0 {
            bail!("--pr-k must be at least 1");
        }
        if self.kid_subsets == 0 {
            bail!("--kid-subsets must be at least 1");
        }
        if !(self.frechet_offset >= 0.0 && self.frechet_offset.is_finite()) {
            bail!("--frechet-offset must be a finite non-negative number");
        }
        Ok(SuiteSpec {
            metrics,
            split: SplitSpec {
                split_count: self.splits,
                seed: None,
            },
            kid: KidSpec {
                subset_size: self.kid_subset_size,
                subset_count: self.kid_subsets,
                seed: self.seed,
                ..KidSpec::default()
            },
            pr: PrSpec {
                neighborhood_k: self.pr_k,
            },
            naming,
            frechet_diagonal_offset: self.frechet_offset,
            ..SuiteSpec::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// markdown, csv or json.
    #[arg(long, default_value = "markdown")]
    pub format: ReportFormat,
    /// Stamp the report with the generation time.
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timestamps: bool,
}

fn is_family(metric: MetricName) -> bool {
    matches!(metric, MetricName::IS | MetricName::IsStar)
}

pub fn compute(args: &ComputeArgs) -> Result<()> {
    let suite = args.inputs.suite()?;
    let inputs = load_inputs(&args.inputs.real, &args.inputs.gen)?;
    let mut rows = Vec::new();

    if !inputs.real.probabilities.is_empty()
        && (suite.metrics.is_empty() || suite.metrics.iter().any(|&m| is_family(m)))
    {
        let real_probs = SetBundle {
            embeddings: vec![],
            probabilities: inputs.real.probabilities.clone(),
        };
        let mut reference_suite = suite.clone();
        reference_suite.metrics = MetricName::ALL
            .iter()
            .copied()
            .filter(|&m| is_family(m) && (suite.metrics.is_empty() || suite.metrics.contains(&m)))
            .collect();
        let outcome = evaluate_suite(&SetBundle::default(), &real_probs, &reference_suite)
            .context("--real")?;
        let label = inputs.real_label.clone().unwrap_or_else(|| "real".into());
        rows.push(ModelRow::reference(label, outcome.results));
    }

    for (model, bundle) in &inputs.models {
        let outcome = evaluate_suite(&inputs.real, bundle, &suite)
            .with_context(|| format!("model {model:?}"))?;
        for s in &outcome.skipped {
            eprintln!("note: {model}: skipped {}: {}", s.metric.title(), s.reason);
        }
        rows.push(ModelRow::new(model.clone(), outcome.results));
    }

    let mut report = render_report(&rows, args.format);
    if args.timestamps {
        report = stamp(report, args.format);
    }
    emit(args.out.as_deref(), &report)
}

pub fn run_sweep(args: &SweepArgs) -> Result<()> {
    let suite = args.inputs.suite()?;
    let inputs = load_inputs(&args.inputs.real, &args.inputs.gen)?;
    let spec = SweepSpec {
        sizes: args.sizes.clone(),
        repeats: args.repeats,
        seed: args.inputs.seed,
    };
    let mut out = String::new();
    if args.timestamps {
        out.push_str(&format!("# generated_at={}\n", now()));
    }
    for (i, (model, bundle)) in inputs.models.iter().enumerate() {
        let rows = sweep(&inputs.real, bundle, &suite, &spec)
            .with_context(|| format!("--sizes: model {model:?}"))?;
        let csv = sweep_csv(model, &rows);
        // header once
        let body = if i == 0 {
            csv.as_str()
        } else {
            csv.split_once('\n').map_or("", |(_, rest)| rest)
        };
        out.push_str(body);
    }
    emit(args.out.as_deref(), &out)
}

fn now() -> String {
    humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string()
}

fn stamp(report: String, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => format!("{report}\n_Generated {}_\n", now()),
        ReportFormat::Csv => format!("# generated_at={}\n{report}", now()),
        ReportFormat::Json => {
            let mut value: serde_json::Value =
                serde_json::from_str(&report).expect("report is valid JSON");
            value["generated_at"] = serde_json::Value::String(now());
            serde_json::to_string_pretty(&value).expect("serializable") + "\n"
        }
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("--out {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
