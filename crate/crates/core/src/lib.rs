//! Recompose archived composite web pages and evaluate the temporal
//! coherence of their embedded resources.
//!
//! An archived page is replayed with a single capture datetime, yet the
//! images, stylesheets, and frames stitched into it were often captured
//! hours, months, or years away from that datetime. This crate rebuilds the
//! composite (root memento plus every embedded memento), classifies each
//! embedded resource into one of twenty temporal-coherence patterns, and
//! reports per-resource verdicts plus temporal-spread statistics.
//!
//! The pipeline, in order:
//!
//! 1. [`archive`] fetches timemaps and mementos from a live Memento archive
//!    or an offline fixture store.
//! 2. [`recompose`] selects the best memento per resource and walks the
//!    embedding graph breadth-first.
//! 3. [`classify`] assigns each embedded resource a pattern and coherence
//!    state from capture datetimes, Last-Modified evidence, and optionally
//!    entity-body similarity ([`similarity`]).
//! 4. [`report`] turns the verdicts into spread statistics and a
//!    deterministic JSON report.
//!
//! [`datetime`] underpins all of it with lenient, audited parsing of the
//! malformed datetimes that archival headers accumulate.

#![forbid(unsafe_code)]

pub mod archive;
pub mod classify;
pub mod datetime;
pub mod error;
pub mod extract;
pub mod model;
pub mod recompose;
pub mod report;
pub mod similarity;

pub use archive::{ArchiveClient, ArchiveSource, FetchOutcome, SourceKind};
pub use classify::{
    classify, classify_composite, CoherenceState, CoherenceVerdict, EvaluationMode, Evidence,
    PatternCode,
};
pub use datetime::{
    check_header_ordering, format_rfc1123, parse_http_datetime, parse_http_datetime_with,
    validate_last_modified, ArchivalDatetime, DatetimeField, HeaderOrdering, LocaleTables, Repair,
    UndefinedReason, DEFAULT_ORDERING_EPSILON_SECS,
};
pub use error::{ArchiveError, ModelError, RecomposeError};
pub use extract::{extract_embedded, ExtractedResource, ExtractionKind, ExtractionResult};
pub use model::{
    CompositeMemento, MementoFlag, MementoRecord, Neighbors, OriginalResourceRef, Resolution,
    ResolutionEntry, TimeMapRecord,
};
pub use recompose::{
    recompose, select_memento, RecomposeLimits, RecomposeOptions, SelectionHeuristic,
};
pub use report::{
    build_report, compute_spread, render_delta, render_spread, report_to_json, CoherenceReport,
    EntryReport, SpreadReport,
};
pub use similarity::{
    bodies_equal, bodies_similar, evaluate_relation, ContentRelation, SimilarityPolicy,
    StripProfile, StripRule,
};
