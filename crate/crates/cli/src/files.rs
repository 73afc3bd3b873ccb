//! `validate` and `import`.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, ValueEnum};
use geneval_core::io::{import_csv, read_gemb_file, write_gemb_file, GembData, GembKind};
use geneval_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Embeddings,
    Probabilities,
}

impl From<Kind> for GembKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Embeddings => GembKind::Embeddings,
            Kind::Probabilities => GembKind::Probabilities,
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// GEMB or CSV files.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// How to read CSV inputs.
    #[arg(long, value_enum, default_value_t = Kind::Embeddings)]
    pub csv_kind: Kind,
    /// CSV inputs start with a header line.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    /// Numeric CSV, one row per image.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub backbone: String,
    /// "real" or the generating method.
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub header: bool,
    /// Destination GEMB file.
    #[arg(long, short)]
    pub out: PathBuf,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn check(path: &Path, args: &ValidateArgs) -> geneval_core::Result<GembData> {
    if is_csv(path) {
        let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
        import_csv(file, args.csv_kind.into(), "csv", "csv", args.header)
            .map_err(|e| e.in_file(path))
    } else {
        read_gemb_file(path)
    }
}

fn describe(data: &GembData) -> String {
    let (n, d) = data.shape();
    let kind = match data.kind() {
        GembKind::Embeddings => "embeddings",
        GembKind::Probabilities => "probabilities",
    };
    format!(
        "{kind} {n}x{d}, backbone {:?}, source {:?}",
        data.backbone_id(),
        data.source_label().as_str()
    )
}

/// Checks every file and reports all problems; fails if any file is bad.
pub fn validate(args: &ValidateArgs) -> Result<()> {
    let mut bad = 0;
    for path in &args.paths {
        match check(path, args) {
            Ok(data) => println!("ok  {}  {}", path.display(), describe(&data)),
            Err(e) => {
                bad += 1;
                println!("bad {}", path.display());
                match e.root() {
                    Error::InvalidProbabilities(report) => {
                        for v in &report.violations {
                            eprintln!("{}: {v}", path.display());
                        }
                    }
                    _ => eprintln!("{e}"),
                }
            }
        }
    }
    if bad > 0 {
        return Err(anyhow!("{bad} of {} files failed validation", args.paths.len()));
    }
    Ok(())
}

pub fn import(args: &ImportArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| args.input.display().to_string())?;
    let data = import_csv(file, args.kind.into(), &args.backbone, &args.source, args.header)
        .map_err(|e| e.in_file(&args.input))?;
    write_gemb_file(&data, &args.out).with_context(|| format!("--out {}", args.out.display()))?;
    eprintln!("wrote {} ({})", args.out.display(), describe(&data));
    Ok(())
}
