//! Domain vocabulary for archived resources: original resources, mementos,
//! timemaps, and composite mementos.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::datetime::{ArchivalDatetime, DatetimeField};
use crate::error::ModelError;

/// An original (live-web) resource: a URI-R.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OriginalResourceRef {
    uri_r: String,
}

impl OriginalResourceRef {
    /// Validate that the URI is syntactically absolute (scheme and host).
    pub fn parse(uri: &str) -> Result<Self, ModelError> {
        match url::Url::parse(uri) {
            Ok(parsed) if parsed.has_host() => Ok(OriginalResourceRef {
                uri_r: uri.to_string(),
            }),
            _ => Err(ModelError::NotAbsoluteUri(uri.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.uri_r
    }
}

impl fmt::Display for OriginalResourceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.uri_r)
    }
}

/// Per-memento conditions discovered while fetching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MementoFlag {
    /// The archive redirected this URI-M out to the live web; the record
    /// must never be treated as an archived representation.
    LiveWebRedirect,
    /// The memento could not be retrieved (network failure, missing body).
    Unretrievable,
    /// Header ordering suggests a dynamically generated representation.
    DynamicSuspect,
}

impl MementoFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MementoFlag::LiveWebRedirect => "live-web-redirect",
            MementoFlag::Unretrievable => "unretrievable",
            MementoFlag::DynamicSuspect => "dynamic-suspect",
        }
    }
}

/// One archived capture of an original resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MementoRecord {
    pub uri_m: String,
    pub memento_datetime: ArchivalDatetime,
    pub last_modified: DatetimeField,
    /// Date header preserved from the original capture, when the archive
    /// exposes one; not the replay-time response date.
    pub response_date: DatetimeField,
    pub body: Option<Vec<u8>>,
    pub body_digest: Option<String>,
    pub media_type: Option<String>,
    pub flags: BTreeSet<MementoFlag>,
}

impl MementoRecord {
    /// A headers-only record with nothing but its capture datetime, as
    /// produced by timemap parsing.
    pub fn new(uri_m: impl Into<String>, memento_datetime: ArchivalDatetime) -> Self {
        MementoRecord {
            uri_m: uri_m.into(),
            memento_datetime,
            last_modified: DatetimeField::absent(),
            response_date: DatetimeField::absent(),
            body: None,
            body_digest: None,
            media_type: None,
            flags: BTreeSet::new(),
        }
    }

    /// Attach an entity body, computing its digest.
    pub fn with_body(mut self, body: Vec<u8>) -> Self {
        self.body_digest = Some(body_digest(&body));
        self.body = Some(body);
        self
    }

    pub fn has_flag(&self, flag: MementoFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// Usable as classification evidence: not redirected to the live web and
    /// actually retrieved.
    pub fn is_retrievable(&self) -> bool {
        !self.has_flag(MementoFlag::LiveWebRedirect) && !self.has_flag(MementoFlag::Unretrievable)
    }

    pub fn epoch(&self) -> i64 {
        self.memento_datetime.epoch_seconds()
    }
}

/// SHA-256 digest of an entity body, hex-encoded.
pub fn body_digest(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

/// The neighbors of a pivot datetime within a timemap.
#[derive(Debug, Clone, Copy)]
pub struct Neighbors<'a> {
    /// Latest memento strictly before the pivot.
    pub left: Option<&'a MementoRecord>,
    /// Earliest memento strictly after the pivot.
    pub right: Option<&'a MementoRecord>,
    /// First memento captured exactly at the pivot.
    pub equal: Option<&'a MementoRecord>,
}

/// All known mementos for one original resource, ascending by capture
/// datetime. May be empty. Ties keep their source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMapRecord {
    resource: OriginalResourceRef,
    mementos: Vec<MementoRecord>,
}

impl TimeMapRecord {
    pub fn new(resource: OriginalResourceRef, mut mementos: Vec<MementoRecord>) -> Self {
        mementos.sort_by_key(MementoRecord::epoch);
        TimeMapRecord { resource, mementos }
    }

    pub fn empty(resource: OriginalResourceRef) -> Self {
        TimeMapRecord {
            resource,
            mementos: Vec::new(),
        }
    }

    pub fn resource(&self) -> &OriginalResourceRef {
        &self.resource
    }

    pub fn mementos(&self) -> &[MementoRecord] {
        &self.mementos
    }

    pub fn is_empty(&self) -> bool {
        self.mementos.is_empty()
    }

    pub fn len(&self) -> usize {
        self.mementos.len()
    }

    /// Replace the record at `index`, preserving sort order. The replacement
    /// must carry the same capture datetime.
    pub fn replace(&mut self, index: usize, record: MementoRecord) {
        debug_assert_eq!(self.mementos[index].epoch(), record.epoch());
        self.mementos[index] = record;
    }

    pub fn add_flag(&mut self, index: usize, flag: MementoFlag) {
        self.mementos[index].flags.insert(flag);
    }

    /// Locate the neighbors of a pivot datetime by binary search.
    pub fn neighbors(&self, pivot: &ArchivalDatetime) -> Neighbors<'_> {
        let p = pivot.epoch_seconds();
        let first_ge = self.mementos.partition_point(|m| m.epoch() < p);
        let first_gt = self.mementos.partition_point(|m| m.epoch() <= p);
        Neighbors {
            left: first_ge.checked_sub(1).map(|i| &self.mementos[i]),
            right: self.mementos.get(first_gt),
            equal: (first_ge < first_gt).then(|| &self.mementos[first_ge]),
        }
    }
}

/// How an embedded resource resolved during recomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// The desired memento was selected and retrieved.
    Resolved,
    /// No timemap (or no usable mementos) exists for the resource.
    NotArchived,
    /// A timemap exists but the desired memento could not be retrieved.
    MissingMemento,
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Resolution::Resolved => "resolved",
            Resolution::NotArchived => "not-archived",
            Resolution::MissingMemento => "missing-memento",
        }
    }
}

/// Resolution outcome for one embedded original resource.
#[derive(Debug, Clone)]
pub struct ResolutionEntry {
    pub resource: OriginalResourceRef,
    pub selected: Option<MementoRecord>,
    /// Latest capture strictly before the root's Memento-Datetime.
    pub left_neighbor: Option<MementoRecord>,
    /// Earliest capture strictly after the root's Memento-Datetime.
    pub right_neighbor: Option<MementoRecord>,
    /// Levels below the root at which this resource was discovered (>= 1).
    pub discovery_depth: u32,
    /// URI-M of the memento whose representation embedded this resource.
    pub discovered_from: String,
    pub resolution: Resolution,
    /// The (possibly enriched) timemap the entry was resolved against.
    pub timemap: TimeMapRecord,
}

/// A recomposed composite memento: the root plus one resolution entry per
/// distinct embedded original resource.
#[derive(Debug, Clone)]
pub struct CompositeMemento {
    pub root_resource: OriginalResourceRef,
    pub root: MementoRecord,
    pub target_datetime: ArchivalDatetime,
    pub entries: Vec<ResolutionEntry>,
    /// Resources discovered after the resource limit was reached; recorded
    /// rather than silently dropped, but not resolved.
    pub truncated: Vec<OriginalResourceRef>,
    pub heuristic_name: String,
}
