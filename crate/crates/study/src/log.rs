//! Append-only NDJSON event log.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, StudyError};
use crate::model::{AnnotationRecord, StudyDefinition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    StudyCreated {
        study: StudyDefinition,
        /// Image ids in serving order.
        order: Vec<String>,
        at: u64,
    },
    LeaseGranted {
        study_id: String,
        image_id: String,
        user_id: String,
        expires_at: u64,
        at: u64,
    },
    Annotation(AnnotationRecord),
}

impl Event {
    pub fn study_id(&self) -> &str {
        match self {
            Event::StudyCreated { study, .. } => &study.study_id,
            Event::LeaseGranted { study_id, .. } => study_id,
            Event::Annotation(r) => &r.study_id,
        }
    }
}

pub struct EventLog {
    path: PathBuf,
    file: File,
    sync: bool,
}

impl EventLog {
    /// Opens (creating if needed) the log and returns it with every stored
    /// event. A partially written final line, left by a crash mid-append,
    /// is dropped and truncated away.
    pub fn open(path: impl AsRef<Path>, sync: bool) -> Result<(EventLog, Vec<Event>)> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)?;
        let mut events = Vec::new();
        let mut good_len = 0u64;
        let mut reader = BufReader::new(&file);
        let mut line = String::new();
        let mut number = 0usize;
        let mut missing_newline = false;
        loop {
            line.clear();
            let read = reader.read_line(&mut line)?;
            if read == 0 {
                break;
            }
            number += 1;
            let complete = line.ends_with('\n');
            let text = line.trim();
            if text.is_empty() {
                good_len += read as u64;
                continue;
            }
            match serde_json::from_str::<Event>(text) {
                Ok(e) => {
                    events.push(e);
                    good_len += read as u64;
                    missing_newline = !complete;
                }
                Err(_) if !complete => break,
                Err(e) => {
                    return Err(StudyError::CorruptLog {
                        line: number,
                        reason: e.to_string(),
                    })
                }
            }
        }
        drop(reader);
        if file.metadata()?.len() > good_len {
            file.set_len(good_len)?;
            file.seek(SeekFrom::End(0))?;
        }
        if missing_newline {
            file.write_all(b"\n")?;
        }
        Ok((EventLog { path, file, sync }, events))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, event: &Event) -> Result<()> {
        let mut line = serde_json::to_string(event).expect("events serialize");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        if self.sync {
            self.file.sync_data()?;
        }
        Ok(())
    }
}

/// Reads a log without opening it for writing.
pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<Event>> {
    let reader = BufReader::new(File::open(path)?);
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(
            serde_json::from_str(&line).map_err(|e| StudyError::CorruptLog {
                line: i + 1,
                reason: e.to_string(),
            })?,
        );
    }
    Ok(events)
}
