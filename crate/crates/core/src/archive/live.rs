//! Live Memento-protocol archive client over HTTP.

use std::time::Duration;

use crate::archive::headers::{record_from_headers, HeaderBlock};
use crate::archive::link_format::{interpret_timemap, parse_link_format};
use crate::archive::politeness::PolitenessLimiter;
use crate::archive::rewrite::RewriteProfile;
use crate::archive::{FetchOutcome, MAX_REDIRECT_HOPS, URI_PLACEHOLDER};
use crate::error::ArchiveError;
use crate::model::{OriginalResourceRef, TimeMapRecord};

/// Client for an archive exposing RFC 7089 timemaps.
#[derive(Debug)]
pub struct LiveClient {
    http: reqwest::blocking::Client,
    timemap_template: String,
    archive_host: String,
    limiter: PolitenessLimiter,
    rewrite: RewriteProfile,
}

impl LiveClient {
    pub fn new(
        timemap_template: &str,
        politeness_delay_ms: u64,
        max_parallel_fetches: usize,
        request_timeout_ms: u64,
        rewrite: RewriteProfile,
    ) -> Result<Self, ArchiveError> {
        if timemap_template.matches(URI_PLACEHOLDER).count() != 1 {
            return Err(ArchiveError::Config(format!(
                "timemap endpoint template must contain exactly one {URI_PLACEHOLDER} placeholder: {timemap_template}"
            )));
        }
        let probe = timemap_template.replace(URI_PLACEHOLDER, "http://example.com/");
        let archive_host = host_of(&probe).ok_or_else(|| {
            ArchiveError::Config(format!("cannot determine archive host from {timemap_template}"))
        })?;
        let http = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(Duration::from_millis(request_timeout_ms.max(1)))
            .build()
            .map_err(|e| ArchiveError::Config(e.to_string()))?;
        Ok(LiveClient {
            http,
            timemap_template: timemap_template.to_string(),
            archive_host,
            limiter: PolitenessLimiter::new(politeness_delay_ms, max_parallel_fetches),
            rewrite,
        })
    }

    pub fn archive_host(&self) -> &str {
        &self.archive_host
    }

    pub fn rewrite_profile(&self) -> RewriteProfile {
        self.rewrite
    }

    pub fn fetch_timemap(&self, resource: &OriginalResourceRef) -> Result<TimeMapRecord, ArchiveError> {
        let uri = self.timemap_template.replace(URI_PLACEHOLDER, resource.as_str());
        let _permit = self.limiter.acquire(&self.archive_host);
        let response = self
            .http
            .get(&uri)
            .send()
            .map_err(|e| transient(&uri, e.to_string()))?;
        match response.status().as_u16() {
            200 => {
                let text = response.text().map_err(|e| transient(&uri, e.to_string()))?;
                let links = parse_link_format(&text)?;
                let doc = interpret_timemap(&links);
                Ok(TimeMapRecord::new(resource.clone(), doc.mementos))
            }
            404 | 410 => Err(ArchiveError::TimemapNotFound {
                uri: resource.as_str().to_string(),
            }),
            other => Err(transient(&uri, format!("status {other}"))),
        }
    }

    pub fn fetch_memento(&self, uri_m: &str, want_body: bool) -> FetchOutcome {
        let mut current = uri_m.to_string();
        for _ in 0..=MAX_REDIRECT_HOPS {
            let host = match host_of(&current) {
                Some(host) => host,
                None => {
                    return FetchOutcome::Failed {
                        reason: format!("{current}: no host"),
                    }
                }
            };
            let _permit = self.limiter.acquire(&host);
            let response = match self.http.get(&current).send() {
                Ok(r) => r,
                Err(e) => return FetchOutcome::Failed { reason: e.to_string() },
            };
            let status = response.status().as_u16();

            if (300..400).contains(&status) {
                let Some(location) = response
                    .headers()
                    .get(reqwest::header::LOCATION)
                    .and_then(|v| v.to_str().ok())
                else {
                    return FetchOutcome::Failed {
                        reason: format!("{current}: {status} without Location"),
                    };
                };
                let target = match url::Url::parse(&current).and_then(|base| base.join(location)) {
                    Ok(u) => u.to_string(),
                    Err(e) => {
                        return FetchOutcome::Failed {
                            reason: format!("{current}: bad Location: {e}"),
                        }
                    }
                };
                // Leaving the archive's URI space means the archive is
                // punting to the live web; never treat that as a memento.
                if host_of(&target).as_deref() != Some(self.archive_host.as_str()) {
                    return FetchOutcome::Redirected {
                        to_uri: target,
                        live_web: true,
                    };
                }
                current = target;
                continue;
            }
            if status != 200 {
                return FetchOutcome::Failed {
                    reason: format!("{current}: status {status}"),
                };
            }

            let block = HeaderBlock {
                status,
                headers: response
                    .headers()
                    .iter()
                    .map(|(n, v)| {
                        (
                            n.as_str().to_string(),
                            String::from_utf8_lossy(v.as_bytes()).into_owned(),
                        )
                    })
                    .collect(),
            };
            let body = if want_body {
                match response.bytes() {
                    Ok(bytes) => Some(bytes.to_vec()),
                    Err(e) => return FetchOutcome::Failed { reason: e.to_string() },
                }
            } else {
                None
            };
            return match record_from_headers(&current, &block, body) {
                Ok(record) => FetchOutcome::Ok(Box::new(record)),
                Err(e) => FetchOutcome::Failed { reason: e.to_string() },
            };
        }
        FetchOutcome::Failed {
            reason: format!("{uri_m}: redirect limit exceeded"),
        }
    }
}

fn transient(uri: &str, reason: String) -> ArchiveError {
    ArchiveError::Transient {
        uri: uri.to_string(),
        reason,
    }
}

fn host_of(uri: &str) -> Option<String> {
    url::Url::parse(uri)
        .ok()
        .and_then(|u| u.host_str().map(str::to_string))
}
