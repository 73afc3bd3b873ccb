//! Loading `--real`/`--gen` files into per-model bundles.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use geneval_core::io::{read_gemb_file, GembData};
use geneval_core::{SetBundle, SourceLabel};

/// One `BACKBONE=PATH` flag value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub backbone: String,
    pub path: PathBuf,
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('=') {
            Some((b, p)) if !b.is_empty() && !p.is_empty() => Ok(InputSpec {
                backbone: b.to_owned(),
                path: PathBuf::from(p),
            }),
            _ => Err(format!("expected BACKBONE=PATH, got {s:?}")),
        }
    }
}

impl std::fmt::Display for InputSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}={}", self.backbone, self.path.display())
    }
}

fn load(flag: &str, spec: &InputSpec) -> Result<GembData> {
    let data = read_gemb_file(&spec.path).with_context(|| format!("--{flag} {spec}"))?;
    if data.backbone_id() != spec.backbone {
        bail!(
            "--{flag} {spec}: file declares backbone {:?}, not {:?}",
            data.backbone_id(),
            spec.backbone
        );
    }
    Ok(data)
}

fn add(bundle: &mut SetBundle, data: GembData) {
    match data {
        GembData::Embeddings(e) => bundle.embeddings.push(e),
        GembData::Probabilities(p) => bundle.probabilities.push(p),
    }
}

pub struct Inputs {
    /// Source label of the first real file, if any.
    pub real_label: Option<String>,
    pub real: SetBundle,
    /// Generated bundles grouped by source label, in command-line order.
    pub models: Vec<(String, SetBundle)>,
}

pub fn load_inputs(real: &[InputSpec], gen: &[InputSpec]) -> Result<Inputs> {
    let mut real_bundle = SetBundle::default();
    let mut real_label = None;
    for spec in real {
        let data = load("real", spec)?;
        real_label.get_or_insert_with(|| data.source_label().as_str().to_owned());
        add(&mut real_bundle, data);
    }
    let mut models: Vec<(SourceLabel, String, SetBundle)> = Vec::new();
    for spec in gen {
        let data = load("gen", spec)?;
        let label = data.source_label().clone();
        let slot = match models.iter().position(|(l, _, _)| *l == label) {
            Some(i) => i,
            None => {
                models.push((label.clone(), label.as_str().to_owned(), SetBundle::default()));
                models.len() - 1
            }
        };
        add(&mut models[slot].2, data);
    }
    Ok(Inputs {
        real_label,
        real: real_bundle,
        models: models.into_iter().map(|(_, name, b)| (name, b)).collect(),
    })
}
