//! Study state, rebuilt from and persisted to the event log.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Component, Path};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use geneval_core::SourceLabel;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, StudyError};
use crate::log::{Event, EventLog};
use crate::model::{
    Acknowledgment, AnnotationRecord, Label, NextTask, Progress, SourceTally, StudyDefinition,
    StudyResults,
};

pub trait Clock: Send + Sync {
    /// Milliseconds since the Unix epoch.
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn new(start_ms: u64) -> Self {
        ManualClock(AtomicU64::new(start_ms))
    }

    pub fn advance_secs(&self, secs: u64) {
        self.0.fetch_add(secs * 1000, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now_ms(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone)]
struct Lease {
    user: String,
    expires_at: u64,
}

#[derive(Debug)]
struct StudyState {
    def: StudyDefinition,
    order: Vec<usize>,
    index: HashMap<String, usize>,
    per_user: HashMap<String, usize>,
    labels: Vec<Option<AnnotationRecord>>,
    leases: Vec<Option<Lease>>,
    labeled: usize,
    events: Vec<Event>,
}

impl StudyState {
    fn new(def: StudyDefinition, order: &[String]) -> Result<Self> {
        let index: HashMap<String, usize> = def
            .roster
            .iter()
            .enumerate()
            .map(|(i, e)| (e.image_id.clone(), i))
            .collect();
        let order = order
            .iter()
            .map(|id| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| StudyError::InvalidDefinition(format!("order names unknown image {id:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if order.len() != def.roster.len() || order.iter().collect::<HashSet<_>>().len() != order.len() {
            return Err(StudyError::InvalidDefinition(
                "serving order is not a permutation of the roster".into(),
            ));
        }
        let n = def.roster.len();
        let per_user = def.annotators.iter().map(|u| (u.clone(), 0)).collect();
        Ok(StudyState {
            def,
            order,
            index,
            per_user,
            labels: vec![None; n],
            leases: vec![None; n],
            labeled: 0,
            events: Vec::new(),
        })
    }

    fn image(&self, image_id: &str) -> Result<usize> {
        self.index
            .get(image_id)
            .copied()
            .ok_or_else(|| StudyError::UnknownImage(image_id.to_owned()))
    }

    fn user_count(&self, user: &str) -> Result<usize> {
        self.per_user
            .get(user)
            .copied()
            .ok_or_else(|| StudyError::UnknownUser(user.to_owned()))
    }

    fn progress(&self, mine: usize) -> Progress {
        Progress {
            labeled: self.labeled,
            total: self.def.roster.len(),
            mine,
        }
    }

    fn active_lease(&self, idx: usize, now: u64) -> Option<&Lease> {
        self.leases[idx].as_ref().filter(|l| l.expires_at > now)
    }

    fn task(&self, idx: usize, expires_at: u64, mine: usize) -> NextTask {
        let image_id = self.def.roster[idx].image_id.clone();
        NextTask::Task {
            image_url: format!("/studies/{}/images/{}", self.def.study_id, image_id),
            image_id,
            lease_expires_at: expires_at,
            progress: self.progress(mine),
        }
    }

    fn apply(&mut self, event: Event) -> Result<()> {
        match &event {
            Event::StudyCreated { .. } => {
                return Err(StudyError::DuplicateStudy(self.def.study_id.clone()))
            }
            Event::LeaseGranted {
                image_id,
                user_id,
                expires_at,
                ..
            } => {
                let idx = self.image(image_id)?;
                self.user_count(user_id)?;
                self.leases[idx] = Some(Lease {
                    user: user_id.clone(),
                    expires_at: *expires_at,
                });
            }
            Event::Annotation(record) => {
                let idx = self.image(&record.image_id)?;
                let count = self.user_count(&record.user_id)?;
                if self.labels[idx].is_some() {
                    return Err(StudyError::AlreadyLabeled {
                        image_id: record.image_id.clone(),
                    });
                }
                self.labels[idx] = Some(record.clone());
                self.leases[idx] = None;
                self.labeled += 1;
                self.per_user.insert(record.user_id.clone(), count + 1);
            }
        }
        self.events.push(event);
        Ok(())
    }

    fn results(&self) -> StudyResults {
        let mut tallies: Vec<SourceTally> = Vec::new();
        let mut slot: HashMap<SourceLabel, usize> = HashMap::new();
        for (entry, label) in self.def.roster.iter().zip(&self.labels) {
            let key = SourceLabel::new(entry.true_source.as_str());
            let i = *slot.entry(key).or_insert_with(|| {
                tallies.push(SourceTally {
                    source: entry.true_source.clone(),
                    roster_count: 0,
                    predicted_real: 0,
                    predicted_fake: 0,
                    annotated: 0,
                    missing: 0,
                    success_rate: None,
                });
                tallies.len() - 1
            });
            let t = &mut tallies[i];
            t.roster_count += 1;
            match label.as_ref().map(|r| r.label) {
                Some(Label::Real) => t.predicted_real += 1,
                Some(Label::Fake) => t.predicted_fake += 1,
                None => t.missing += 1,
            }
        }
        for t in &mut tallies {
            t.annotated = t.predicted_real + t.predicted_fake;
            if t.annotated > 0 {
                t.success_rate = Some(t.predicted_real as f64 / t.annotated as f64);
            }
        }
        StudyResults {
            study_id: self.def.study_id.clone(),
            sources: tallies,
            total_annotated: self.labeled,
            total_images: self.def.roster.len(),
        }
    }
}

fn safe_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 200
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

/// True for non-empty relative paths without `..` components.
pub fn is_contained_path(path: &str) -> bool {
    let p = Path::new(path);
    !path.is_empty() && p.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
}

pub fn validate_definition(def: &StudyDefinition) -> Result<()> {
    let bad = |msg: String| Err(StudyError::InvalidDefinition(msg));
    if !safe_id(&def.study_id) {
        return bad(format!(
            "study_id {:?} must be non-empty and use only letters, digits, '-', '_' or '.'",
            def.study_id
        ));
    }
    if def.roster.is_empty() {
        return bad("roster is empty".into());
    }
    if def.annotators.is_empty() {
        return bad("no annotators".into());
    }
    if def.lease_seconds == 0 {
        return bad("lease_seconds must be positive".into());
    }
    let mut ids = HashSet::new();
    for e in &def.roster {
        if !safe_id(&e.image_id) {
            return bad(format!("image_id {:?} is not a safe identifier", e.image_id));
        }
        if !ids.insert(e.image_id.as_str()) {
            return bad(format!("duplicate image_id {:?}", e.image_id));
        }
        if !is_contained_path(&e.image_path) {
            return bad(format!(
                "image_path {:?} must be relative without '..'",
                e.image_path
            ));
        }
        if e.true_source.trim().is_empty() {
            return bad(format!("image {:?} has an empty true_source", e.image_id));
        }
    }
    let mut users = HashSet::new();
    for u in &def.annotators {
        if u.trim().is_empty() {
            return bad("empty annotator id".into());
        }
        if !users.insert(u.as_str()) {
            return bad(format!("duplicate annotator {u:?}"));
        }
    }
    Ok(())
}

/// Seeded uniform shuffle of the roster.
pub fn serving_order(def: &StudyDefinition) -> Vec<String> {
    let mut ids: Vec<String> = def.roster.iter().map(|e| e.image_id.clone()).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(def.seed));
    ids
}

pub struct StudyStore {
    studies: BTreeMap<String, StudyState>,
    log: Option<EventLog>,
    clock: Arc<dyn Clock>,
}

impl StudyStore {
    /// A store that keeps nothing on disk.
    pub fn in_memory(clock: Arc<dyn Clock>) -> Self {
        StudyStore {
            studies: BTreeMap::new(),
            log: None,
            clock,
        }
    }

    /// Opens the log at `path` and replays it. With `sync`, every append is
    /// followed by an fsync.
    pub fn open(path: impl AsRef<Path>, clock: Arc<dyn Clock>, sync: bool) -> Result<Self> {
        let (log, events) = EventLog::open(path, sync)?;
        let mut store = StudyStore::replay(events, clock)?;
        store.log = Some(log);
        Ok(store)
    }

    /// Rebuilds state from events without attaching a log.
    pub fn replay(events: Vec<Event>, clock: Arc<dyn Clock>) -> Result<Self> {
        let mut store = StudyStore::in_memory(clock);
        for (i, event) in events.into_iter().enumerate() {
            store.apply(event).map_err(|e| StudyError::CorruptLog {
                line: i + 1,
                reason: e.to_string(),
            })?;
        }
        Ok(store)
    }

    fn apply(&mut self, event: Event) -> Result<()> {
        if let Event::StudyCreated { study, order, .. } = &event {
            if self.studies.contains_key(&study.study_id) {
                return Err(StudyError::DuplicateStudy(study.study_id.clone()));
            }
            validate_definition(study)?;
            let mut state = StudyState::new(study.clone(), order)?;
            let id = study.study_id.clone();
            state.events.push(event);
            self.studies.insert(id, state);
            return Ok(());
        }
        let id = event.study_id().to_owned();
        self.studies
            .get_mut(&id)
            .ok_or(StudyError::UnknownStudy(id))?
            .apply(event)
    }

    fn commit(&mut self, event: Event) -> Result<()> {
        if let Some(log) = &mut self.log {
            log.append(&event)?;
        }
        self.apply(event)
    }

    fn study(&self, id: &str) -> Result<&StudyState> {
        self.studies
            .get(id)
            .ok_or_else(|| StudyError::UnknownStudy(id.to_owned()))
    }

    pub fn study_ids(&self) -> impl Iterator<Item = &str> {
        self.studies.keys().map(String::as_str)
    }

    pub fn definition(&self, study_id: &str) -> Result<&StudyDefinition> {
        Ok(&self.study(study_id)?.def)
    }

    pub fn create_study(&mut self, def: StudyDefinition) -> Result<()> {
        validate_definition(&def)?;
        if self.studies.contains_key(&def.study_id) {
            return Err(StudyError::DuplicateStudy(def.study_id));
        }
        let order = serving_order(&def);
        let at = self.clock.now_ms();
        self.commit(Event::StudyCreated {
            study: def,
            order,
            at,
        })
    }

    /// Returns the annotator's current lease if one is active, otherwise
    /// leases the first free image in serving order.
    pub fn next_task(&mut self, study_id: &str, user_id: &str) -> Result<NextTask> {
        let now = self.clock.now_ms();
        let state = self.study(study_id)?;
        let mine = state.user_count(user_id)?;
        if let Some(idx) = (0..state.leases.len()).find(|&i| {
            state.labels[i].is_none()
                && state.active_lease(i, now).is_some_and(|l| l.user == user_id)
        }) {
            let expires = state.leases[idx].as_ref().map_or(now, |l| l.expires_at);
            return Ok(state.task(idx, expires, mine));
        }
        if state.labeled == state.def.roster.len()
            || state.def.quota_per_annotator.is_some_and(|q| mine >= q)
        {
            return Ok(NextTask::Exhausted {
                progress: state.progress(mine),
            });
        }
        let free = state
            .order
            .iter()
            .copied()
            .find(|&i| state.labels[i].is_none() && state.active_lease(i, now).is_none());
        let Some(idx) = free else {
            let soonest = state
                .leases
                .iter()
                .flatten()
                .map(|l| l.expires_at)
                .filter(|&t| t > now)
                .min()
                .unwrap_or(now);
            return Ok(NextTask::Wait {
                retry_after_seconds: (soonest - now).div_ceil(1000).max(1),
                progress: state.progress(mine),
            });
        };
        let expires_at = now + state.def.lease_seconds * 1000;
        let image_id = state.def.roster[idx].image_id.clone();
        self.commit(Event::LeaseGranted {
            study_id: study_id.to_owned(),
            image_id,
            user_id: user_id.to_owned(),
            expires_at,
            at: now,
        })?;
        Ok(self.study(study_id)?.task(idx, expires_at, mine))
    }

    /// Records a label. Accepted when the image is unlabeled and no other
    /// annotator holds an active lease on it. Repeating a stored submission
    /// exactly is acknowledged as a duplicate.
    pub fn submit(
        &mut self,
        study_id: &str,
        image_id: &str,
        user_id: &str,
        label: &str,
    ) -> Result<Acknowledgment> {
        let now = self.clock.now_ms();
        let state = self.study(study_id)?;
        let label = Label::parse(label).ok_or_else(|| StudyError::InvalidLabel(label.to_owned()))?;
        state.user_count(user_id)?;
        let idx = state.image(image_id)?;
        let ack = |annotated, duplicate| Acknowledgment {
            study_id: study_id.to_owned(),
            image_id: image_id.to_owned(),
            label,
            duplicate,
            annotated,
        };
        if let Some(existing) = &state.labels[idx] {
            if existing.user_id == user_id && existing.label == label {
                return Ok(ack(state.labeled, true));
            }
            return Err(StudyError::AlreadyLabeled {
                image_id: image_id.to_owned(),
            });
        }
        if state.active_lease(idx, now).is_some_and(|l| l.user != user_id) {
            return Err(StudyError::LeaseConflict {
                image_id: image_id.to_owned(),
            });
        }
        self.commit(Event::Annotation(AnnotationRecord {
            study_id: study_id.to_owned(),
            image_id: image_id.to_owned(),
            user_id: user_id.to_owned(),
            label,
            submitted_at: now,
        }))?;
        Ok(ack(self.study(study_id)?.labeled, false))
    }

    pub fn results(&self, study_id: &str) -> Result<StudyResults> {
        Ok(self.study(study_id)?.results())
    }

    /// The study's events as NDJSON, in log order.
    pub fn export(&self, study_id: &str) -> Result<String> {
        let mut out = String::new();
        for e in &self.study(study_id)?.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn annotations(&self, study_id: &str) -> Result<Vec<AnnotationRecord>> {
        Ok(self
            .study(study_id)?
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Annotation(r) => Some(r.clone()),
                _ => None,
            })
            .collect())
    }

    pub fn image_path(&self, study_id: &str, image_id: &str) -> Result<&str> {
        let state = self.study(study_id)?;
        Ok(&state.def.roster[state.image(image_id)?].image_path)
    }
}
