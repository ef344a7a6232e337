//! Offline fixture-backed archive: a directory tree mirroring what a live
//! Memento archive would serve.
//!
//! Layout, one directory per URI-R (percent-encoded):
//!
//! ```text
//! <root>/
//!   http%3A%2F%2Fexample.com%2Fpage/
//!     timemap.json                  # {"uri_r": ..., "mementos": [...]}
//!     20041209192926.headers        # verbatim header block per memento
//!     20041209192926.body           # optional entity body
//! ```
//!
//! `timemap.json` lists mementos as `{"uri_m", "datetime"}` objects (the
//! datetime in any decodable HTTP-date form) plus an optional
//! `"last_modified"` used by scripting entry points that classify straight
//! from a timemap. A memento listed in the timemap without a `.headers` file
//! is unretrievable, which is exactly how missing mementos are simulated.

use std::path::{Path, PathBuf};

use percent_encoding::{percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};

use crate::archive::headers::{parse_header_block, record_from_headers};
use crate::archive::rewrite::{replay_parts, RewriteProfile};
use crate::archive::FetchOutcome;
use crate::datetime::parse_http_datetime;
use crate::error::ArchiveError;
use crate::model::{MementoRecord, OriginalResourceRef, TimeMapRecord};

// Keep dots, dashes, and underscores readable in directory names.
const DIR_ENCODE_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'.').remove(b'-').remove(b'_');

/// Percent-encoded directory name for a URI-R.
pub fn dir_name_for(uri_r: &str) -> String {
    percent_encode(uri_r.as_bytes(), DIR_ENCODE_SET).to_string()
}

/// Serialized form of a fixture timemap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimemapJson {
    pub uri_r: String,
    pub mementos: Vec<TimemapJsonMemento>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimemapJsonMemento {
    pub uri_m: String,
    pub datetime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_modified: Option<String>,
}

/// Convert fixture JSON into a timemap, dropping mementos whose capture
/// datetime does not decode.
pub fn timemap_from_json(doc: &TimemapJson) -> Result<TimeMapRecord, ArchiveError> {
    let resource = OriginalResourceRef::parse(&doc.uri_r)?;
    let mut records = Vec::new();
    for m in &doc.mementos {
        match parse_http_datetime(&m.datetime).as_defined() {
            Some(dt) => {
                let mut rec = MementoRecord::new(&m.uri_m, dt.clone());
                if let Some(lm) = &m.last_modified {
                    rec.last_modified = crate::datetime::validate_last_modified(
                        parse_http_datetime(lm),
                        &rec.memento_datetime,
                    );
                }
                records.push(rec);
            }
            None => log::warn!(
                "dropping fixture memento {} with undecodable datetime {:?}",
                m.uri_m,
                m.datetime
            ),
        }
    }
    Ok(TimeMapRecord::new(resource, records))
}

/// A fixture-backed archive rooted at a directory.
#[derive(Debug, Clone)]
pub struct FixtureStore {
    root: PathBuf,
    rewrite: RewriteProfile,
    max_redirects: usize,
}

impl FixtureStore {
    pub fn new(root: impl Into<PathBuf>, rewrite: RewriteProfile) -> Self {
        FixtureStore {
            root: root.into(),
            rewrite,
            max_redirects: super::MAX_REDIRECT_HOPS,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn resource_dir(&self, uri_r: &str) -> PathBuf {
        self.root.join(dir_name_for(uri_r))
    }

    pub fn fetch_timemap(&self, resource: &OriginalResourceRef) -> Result<TimeMapRecord, ArchiveError> {
        let path = self.resource_dir(resource.as_str()).join("timemap.json");
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ArchiveError::TimemapNotFound {
                    uri: resource.as_str().to_string(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let doc: TimemapJson = serde_json::from_str(&text)
            .map_err(|e| ArchiveError::Fixture(format!("{}: {e}", path.display())))?;
        if doc.uri_r != resource.as_str() {
            return Err(ArchiveError::Fixture(format!(
                "{}: timemap is for {} but was requested for {}",
                path.display(),
                doc.uri_r,
                resource.as_str()
            )));
        }
        timemap_from_json(&doc)
    }

    pub fn fetch_memento(&self, uri_m: &str, want_body: bool) -> FetchOutcome {
        let mut current = uri_m.to_string();
        for _ in 0..=self.max_redirects {
            let Some(parts) = replay_parts(&current) else {
                return FetchOutcome::Failed {
                    reason: format!("{current}: not a replay URI, cannot locate fixture"),
                };
            };
            let dir = self.resource_dir(parts.uri_r);
            let stamp = parts.stamp.to_string();
            let headers_path = dir.join(format!("{stamp}.headers"));
            let text = match std::fs::read_to_string(&headers_path) {
                Ok(text) => text,
                Err(e) => {
                    return FetchOutcome::Failed {
                        reason: format!("{}: {e}", headers_path.display()),
                    }
                }
            };
            let block = match parse_header_block(&text) {
                Ok(block) => block,
                Err(e) => return FetchOutcome::Failed { reason: e.to_string() },
            };

            if (300..400).contains(&block.status) {
                let Some(location) = block.get("Location") else {
                    return FetchOutcome::Failed {
                        reason: format!("{current}: {} without Location", block.status),
                    };
                };
                let target = match url::Url::parse(&current)
                    .and_then(|base| base.join(location))
                {
                    Ok(u) => u.to_string(),
                    Err(e) => {
                        return FetchOutcome::Failed {
                            reason: format!("{current}: bad Location {location:?}: {e}"),
                        }
                    }
                };
                if !super::same_host(&current, &target) {
                    return FetchOutcome::Redirected {
                        to_uri: target,
                        live_web: true,
                    };
                }
                current = target;
                continue;
            }
            if block.status != 200 {
                return FetchOutcome::Failed {
                    reason: format!("{current}: status {}", block.status),
                };
            }

            let body = if want_body {
                match std::fs::read(dir.join(format!("{stamp}.body"))) {
                    Ok(bytes) => Some(bytes),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
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

    pub fn rewrite_profile(&self) -> RewriteProfile {
        self.rewrite
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_fixture(root: &Path, uri_r: &str, files: &[(&str, &str)]) {
        let dir = root.join(dir_name_for(uri_r));
        fs::create_dir_all(&dir).unwrap();
        for (name, content) in files {
            fs::write(dir.join(name), content).unwrap();
        }
    }

    fn store(root: &Path) -> FixtureStore {
        FixtureStore::new(root, RewriteProfile::Wayback)
    }

    #[test]
    fn missing_directory_is_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let r = OriginalResourceRef::parse("http://nowhere.example/x").unwrap();
        assert!(matches!(
            store(dir.path()).fetch_timemap(&r),
            Err(ArchiveError::TimemapNotFound { .. })
        ));
    }

    #[test]
    fn timemap_and_memento_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let uri_r = "http://example.com/page";
        write_fixture(
            dir.path(),
            uri_r,
            &[
                (
                    "timemap.json",
                    r#"{"uri_r":"http://example.com/page","mementos":[
                        {"uri_m":"http://a.example/web/20041209192926/http://example.com/page",
                         "datetime":"Thu, 09 Dec 2004 19:29:26 GMT"}]}"#,
                ),
                (
                    "20041209192926.headers",
                    "HTTP/1.1 200 OK\nMemento-Datetime: Thu, 09 Dec 2004 19:29:26 GMT\nContent-Type: text/html\n",
                ),
                ("20041209192926.body", "<html>hi</html>"),
            ],
        );
        let s = store(dir.path());
        let r = OriginalResourceRef::parse(uri_r).unwrap();
        let tm = s.fetch_timemap(&r).unwrap();
        assert_eq!(tm.len(), 1);
        let outcome = s.fetch_memento(&tm.mementos()[0].uri_m, true);
        let FetchOutcome::Ok(rec) = outcome else {
            panic!("expected Ok, got {outcome:?}");
        };
        assert_eq!(rec.body.as_deref(), Some(b"<html>hi</html>".as_slice()));
        assert!(rec.body_digest.is_some());
    }

    #[test]
    fn missing_headers_file_is_unretrievable() {
        let dir = tempfile::tempdir().unwrap();
        let uri_r = "http://example.com/gone";
        write_fixture(
            dir.path(),
            uri_r,
            &[(
                "timemap.json",
                r#"{"uri_r":"http://example.com/gone","mementos":[
                    {"uri_m":"http://a.example/web/20041210020000/http://example.com/gone",
                     "datetime":"Fri, 10 Dec 2004 02:00:00 GMT"}]}"#,
            )],
        );
        let outcome = store(dir.path())
            .fetch_memento("http://a.example/web/20041210020000/http://example.com/gone", false);
        assert!(matches!(outcome, FetchOutcome::Failed { .. }));
    }

    #[test]
    fn redirect_to_other_host_is_live_web() {
        let dir = tempfile::tempdir().unwrap();
        let uri_r = "http://example.com/ad";
        write_fixture(
            dir.path(),
            uri_r,
            &[(
                "20050101000000.headers",
                "HTTP/1.1 302 Found\nLocation: http://live.example/current\n",
            )],
        );
        let outcome = store(dir.path())
            .fetch_memento("http://a.example/web/20050101000000/http://example.com/ad", false);
        let FetchOutcome::Redirected { to_uri, live_web } = outcome else {
            panic!("expected redirect, got {outcome:?}");
        };
        assert!(live_web);
        assert_eq!(to_uri, "http://live.example/current");
    }

    #[test]
    fn internal_redirect_is_followed() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "http://example.com/old",
            &[(
                "20050101000000.headers",
                "HTTP/1.1 302 Found\nLocation: http://a.example/web/20050101000000/http://example.com/new\n",
            )],
        );
        write_fixture(
            dir.path(),
            "http://example.com/new",
            &[(
                "20050101000000.headers",
                "HTTP/1.1 200 OK\nMemento-Datetime: Sat, 01 Jan 2005 00:00:00 GMT\n",
            )],
        );
        let outcome = store(dir.path())
            .fetch_memento("http://a.example/web/20050101000000/http://example.com/old", false);
        let FetchOutcome::Ok(rec) = outcome else {
            panic!("expected Ok, got {outcome:?}");
        };
        assert_eq!(rec.uri_m, "http://a.example/web/20050101000000/http://example.com/new");
    }

    #[test]
    fn redirect_loop_fails() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "http://example.com/loop",
            &[(
                "20050101000000.headers",
                "HTTP/1.1 302 Found\nLocation: http://a.example/web/20050101000000/http://example.com/loop\n",
            )],
        );
        let outcome = store(dir.path())
            .fetch_memento("http://a.example/web/20050101000000/http://example.com/loop", false);
        assert!(matches!(outcome, FetchOutcome::Failed { .. }));
    }
}
