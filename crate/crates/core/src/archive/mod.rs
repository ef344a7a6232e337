//! Archive access: timemaps, memento headers, and memento bodies from either
//! a live Memento-protocol archive or an offline fixture store.

pub mod fixture;
pub mod headers;
pub mod link_format;
pub mod live;
pub mod politeness;
pub mod rewrite;

use std::path::PathBuf;

use crate::error::ArchiveError;
use crate::model::{MementoRecord, OriginalResourceRef, TimeMapRecord};
use fixture::FixtureStore;
use live::LiveClient;
use rewrite::RewriteProfile;

/// Placeholder replaced by the URI-R in timemap endpoint templates.
pub const URI_PLACEHOLDER: &str = "{uri}";

/// Redirect chains longer than this are treated as failures.
pub const MAX_REDIRECT_HOPS: usize = 5;

/// Where mementos come from.
#[derive(Debug, Clone)]
pub enum SourceKind {
    /// A live archive's timemap endpoint, e.g.
    /// `http://web.archive.org/web/timemap/link/{uri}`.
    LiveMemento { timemap_endpoint_template: String },
    /// A local fixture store directory.
    FixtureStore { root_path: PathBuf },
}

/// Archive access configuration.
#[derive(Debug, Clone)]
pub struct ArchiveSource {
    pub kind: SourceKind,
    pub politeness_delay_ms: u64,
    pub max_parallel_fetches: usize,
    pub request_timeout_ms: u64,
    pub rewrite_profile: RewriteProfile,
}

impl ArchiveSource {
    pub fn fixture(root_path: impl Into<PathBuf>) -> Self {
        ArchiveSource {
            kind: SourceKind::FixtureStore {
                root_path: root_path.into(),
            },
            politeness_delay_ms: 0,
            max_parallel_fetches: 2,
            request_timeout_ms: 30_000,
            rewrite_profile: RewriteProfile::Wayback,
        }
    }

    pub fn live(timemap_endpoint_template: impl Into<String>) -> Self {
        ArchiveSource {
            kind: SourceKind::LiveMemento {
                timemap_endpoint_template: timemap_endpoint_template.into(),
            },
            politeness_delay_ms: 1_000,
            max_parallel_fetches: 2,
            request_timeout_ms: 30_000,
            rewrite_profile: RewriteProfile::Wayback,
        }
    }

    /// Parse a CLI-style source spec: `fixture:<path>` or `live:<template>`.
    pub fn parse_spec(spec: &str) -> Result<Self, ArchiveError> {
        if let Some(path) = spec.strip_prefix("fixture:") {
            Ok(ArchiveSource::fixture(path))
        } else if let Some(template) = spec.strip_prefix("live:") {
            Ok(ArchiveSource::live(template))
        } else {
            Err(ArchiveError::Config(format!(
                "source must be fixture:<path> or live:<timemap-template>, got {spec:?}"
            )))
        }
    }
}

/// Result of fetching one memento.
#[derive(Debug, Clone)]
pub enum FetchOutcome {
    Ok(Box<MementoRecord>),
    /// The archive redirected; `live_web` is set when the target leaves the
    /// archive's URI space, and such outcomes are never mementos.
    Redirected {
        to_uri: String,
        live_web: bool,
    },
    Failed {
        reason: String,
    },
}

/// A ready-to-use archive client for one source.
#[derive(Debug)]
pub enum ArchiveClient {
    Fixture(FixtureStore),
    Live(LiveClient),
}

impl ArchiveClient {
    pub fn new(source: &ArchiveSource) -> Result<Self, ArchiveError> {
        match &source.kind {
            SourceKind::FixtureStore { root_path } => Ok(ArchiveClient::Fixture(
                FixtureStore::new(root_path.clone(), source.rewrite_profile),
            )),
            SourceKind::LiveMemento {
                timemap_endpoint_template,
            } => Ok(ArchiveClient::Live(LiveClient::new(
                timemap_endpoint_template,
                source.politeness_delay_ms,
                source.max_parallel_fetches,
                source.request_timeout_ms,
                source.rewrite_profile,
            )?)),
        }
    }

    /// Fetch and sort the timemap for a resource. An empty timemap is a
    /// valid result; a missing one raises `TimemapNotFound`.
    pub fn fetch_timemap(&self, resource: &OriginalResourceRef) -> Result<TimeMapRecord, ArchiveError> {
        match self {
            ArchiveClient::Fixture(store) => store.fetch_timemap(resource),
            ArchiveClient::Live(client) => client.fetch_timemap(resource),
        }
    }

    /// Fetch one memento, following redirects inside the archive's URI space
    /// and reporting live-web escapes.
    pub fn fetch_memento(&self, uri_m: &str, want_body: bool) -> FetchOutcome {
        match self {
            ArchiveClient::Fixture(store) => store.fetch_memento(uri_m, want_body),
            ArchiveClient::Live(client) => client.fetch_memento(uri_m, want_body),
        }
    }

    pub fn rewrite_profile(&self) -> RewriteProfile {
        match self {
            ArchiveClient::Fixture(store) => store.rewrite_profile(),
            ArchiveClient::Live(client) => client.rewrite_profile(),
        }
    }
}

pub(crate) fn same_host(a: &str, b: &str) -> bool {
    let host = |u: &str| {
        url::Url::parse(u)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
    };
    match (host(a), host(b)) {
        (Some(ha), Some(hb)) => ha == hb,
        _ => false,
    }
}
