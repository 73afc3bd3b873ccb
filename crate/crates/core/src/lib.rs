//! Evaluation toolkit for synthetic imagery.
//!
//! Scores image sets through precomputed embeddings and class
//! probabilities: Inception score (IS, IS*), Fréchet distance (FID, FID*,
//! FCD), kernel distance (KID), and k-NN precision/recall. Inputs travel in
//! the checksummed GEMB container ([`io::gemb`]); results render as
//! markdown, CSV, or JSON comparison tables ([`io::report`]).

pub mod error;
pub mod io;
pub mod manifest;
pub mod metrics;
pub mod model;
pub mod numstats;
pub mod sweep;

pub use error::{Error, Result};
pub use manifest::{DatasetManifest, ManifestEntry, Split};
pub use metrics::{
    evaluate_suite, BackboneNaming, FeatureSpace, KidSpec, PrSpec, SetBundle, SplitSpec,
    SuiteOutcome, SuiteSpec,
};
pub use model::{
    merge_sets, validate_probability_rows, Better, EmbeddingSet, MetricName, MetricResult,
    ProbabilitySet, SourceLabel, ValidationReport, Violation,
};
pub use numstats::{mean_and_covariance, symmetric_eigen, trace_sqrt_product, GaussianSummary};
