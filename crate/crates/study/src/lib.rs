//! Blinded real-versus-generated annotation studies.
//!
//! Annotators pull one image at a time and label it "real" or "fake". Each
//! image receives at most one label. Every state change is appended to an
//! NDJSON log, which is replayed on startup.

pub mod error;
pub mod http;
pub mod log;
pub mod model;
pub mod store;

pub use error::{Result, StudyError};
pub use http::{router, serve, ServiceConfig, ADMIN_TOKEN_HEADER};
pub use log::{read_events, Event, EventLog};
pub use model::{
    Acknowledgment, AnnotationRecord, Label, NextTask, Progress, RosterEntry, SourceTally,
    StudyDefinition, StudyResults, DEFAULT_LEASE_SECONDS,
};
pub use store::{serving_order, validate_definition, Clock, ManualClock, StudyStore, SystemClock};
