//! `study serve | create | results`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Subcommand, ValueEnum};
use geneval_study::{read_events, ServiceConfig, StudyDefinition, StudyStore, SystemClock};

use crate::evaluate::emit;
use crate::Internal;

#[derive(Debug, Subcommand)]
pub enum StudyCommand {
    /// Run the annotation service.
    Serve {
        /// Event log; created if missing and replayed on startup.
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory roster image paths are relative to.
        #[arg(long)]
        images: Option<PathBuf>,
        /// Static annotation UI, served under /ui.
        #[arg(long)]
        ui: Option<PathBuf>,
        /// Token for the export endpoint; generated and printed when absent.
        #[arg(long, env = "GENEVAL_ADMIN_TOKEN", hide_env_values = true)]
        admin_token: Option<String>,
        /// fsync the log after every append.
        #[arg(long)]
        sync: bool,
    },
    /// Add a study to a log without starting the service.
    Create {
        #[arg(long)]
        log: PathBuf,
        /// Study definition JSON.
        definition: PathBuf,
    },
    /// Per-source success rates from a log.
    Results {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        study: String,
        #[arg(long, value_enum, default_value_t = ResultsFormat::Markdown)]
        format: ResultsFormat,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResultsFormat {
    Markdown,
    Json,
}

pub fn run(cmd: &StudyCommand) -> Result<()> {
    match cmd {
        StudyCommand::Serve {
            log,
            bind,
            images,
            ui,
            admin_token,
            sync,
        } => {
            let store = StudyStore::open(log, Arc::new(SystemClock), *sync)
                .with_context(|| format!("--log {}", log.display()))?;
            let token = admin_token.clone().unwrap_or_else(|| {
                let token = format!("{:032x}", rand::random::<u128>());
                eprintln!("admin token: {token}");
                token
            });
            let config = ServiceConfig {
                image_root: images.clone(),
                ui_dir: ui.clone(),
                admin_token: Some(token),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Internal(e.to_string()))?;
            eprintln!("listening on http://{bind}");
            runtime
                .block_on(geneval_study::serve(*bind, store, config))
                .map_err(|e| Internal(format!("server on {bind}: {e}")))?;
            Ok(())
        }
        StudyCommand::Create { log, definition } => {
            let text = std::fs::read_to_string(definition)
                .with_context(|| definition.display().to_string())?;
            let def: StudyDefinition = serde_json::from_str(&text)
                .with_context(|| definition.display().to_string())?;
            let id = def.study_id.clone();
            let mut store = StudyStore::open(log, Arc::new(SystemClock), true)
                .with_context(|| format!("--log {}", log.display()))?;
            store
                .create_study(def)
                .with_context(|| definition.display().to_string())?;
            eprintln!("created study {id:?} in {}", log.display());
            Ok(())
        }
        StudyCommand::Results {
            log,
            study,
            format,
            out,
        } => {
            let events = read_events(log).with_context(|| format!("--log {}", log.display()))?;
            let store = StudyStore::replay(events, Arc::new(SystemClock))
                .with_context(|| format!("--log {}", log.display()))?;
            let results = store.results(study).context("--study")?;
            let text = match format {
                ResultsFormat::Markdown => results.render_markdown(),
                ResultsFormat::Json => serde_json::to_string_pretty(&results)? + "\n",
            };
            emit(out.as_deref(), &text)
        }
    }
}
