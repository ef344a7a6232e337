//! Replay-URL rewriting: mapping rewritten URI-Ms back to the URI-Rs they
//! replay.
//!
//! Archived HTML links point at rewritten replay URLs of the form
//! `http://<archive-host>/web/<14-digit-stamp>[<mode>]/<original-uri>`;
//! extraction needs the original URI back.

use crate::error::ArchiveError;
use crate::model::OriginalResourceRef;

/// A configured rewriting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewriteProfile {
    /// Wayback-style `/web/<stamp><mode>/<uri>` replay paths.
    #[default]
    Wayback,
    /// URIs are already original URIs.
    Identity,
}

impl RewriteProfile {
    pub fn parse(name: &str) -> Result<Self, ArchiveError> {
        match name {
            "wayback" => Ok(RewriteProfile::Wayback),
            "identity" => Ok(RewriteProfile::Identity),
            other => Err(ArchiveError::Config(format!(
                "unknown rewrite profile: {other}"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RewriteProfile::Wayback => "wayback",
            RewriteProfile::Identity => "identity",
        }
    }
}

/// The pieces of a wayback-style replay URL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayParts<'a> {
    /// Scheme plus authority of the archive, e.g. `http://archive.example`.
    pub archive_prefix: &'a str,
    /// The 14-digit capture stamp.
    pub stamp: &'a str,
    /// Replay mode suffix (`im_`, `js_`, ...), empty when absent.
    pub mode: &'a str,
    /// The original URI the replay URL stands for.
    pub uri_r: &'a str,
}

// Replay mode suffixes observed on wayback-style archives.
const KNOWN_MODES: [&str; 8] = ["id_", "im_", "js_", "cs_", "if_", "fw_", "mp_", "oe_"];

/// Split a wayback-style replay URL into its parts, string-wise so that the
/// embedded original URI (including its `//`) survives untouched.
pub fn replay_parts(uri_m: &str) -> Option<ReplayParts<'_>> {
    let scheme_end = uri_m.find("://")? + 3;
    let authority_end = uri_m[scheme_end..]
        .find('/')
        .map(|i| i + scheme_end)
        .unwrap_or(uri_m.len());
    let path = &uri_m[authority_end..];
    let rest = path.strip_prefix("/web/")?;

    let stamp = rest.get(..14)?;
    if !stamp.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let after_stamp = &rest[14..];
    let mode_len = KNOWN_MODES
        .iter()
        .find(|m| after_stamp.starts_with(**m))
        .map(|m| m.len())
        .or_else(|| generic_mode_len(after_stamp))
        .unwrap_or(0);
    let mode = &after_stamp[..mode_len];
    let remainder = after_stamp[mode_len..].strip_prefix('/')?;
    if remainder.is_empty() {
        return None;
    }
    Some(ReplayParts {
        archive_prefix: &uri_m[..authority_end],
        stamp,
        mode,
        uri_r: remainder,
    })
}

// Tolerate unknown short mode suffixes of the same shape (1-3 lowercase
// letters followed by an underscore).
fn generic_mode_len(after_stamp: &str) -> Option<usize> {
    let underscore = after_stamp.find('_')?;
    ((1..=3).contains(&underscore)
        && after_stamp[..underscore].bytes().all(|b| b.is_ascii_lowercase()))
    .then_some(underscore + 1)
}

/// Recover the URI-R a (possibly rewritten) URI-M replays.
pub fn derive_uri_r(uri_m: &str, profile: RewriteProfile) -> Result<OriginalResourceRef, ArchiveError> {
    match profile {
        RewriteProfile::Identity => Ok(OriginalResourceRef::parse(uri_m)?),
        RewriteProfile::Wayback => match replay_parts(uri_m) {
            Some(parts) => Ok(OriginalResourceRef::parse(parts.uri_r)?),
            None => Err(ArchiveError::NonRewrittenUri(uri_m.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_plain_replay_prefix() {
        let r = derive_uri_r(
            "http://a.example/web/20041209192926/http://icons.wunderground.com/x.gif",
            RewriteProfile::Wayback,
        )
        .unwrap();
        assert_eq!(r.as_str(), "http://icons.wunderground.com/x.gif");
    }

    #[test]
    fn strips_mode_suffixes() {
        for mode in ["im_", "js_", "cs_", "if_", "id_", "oe_"] {
            let uri = format!("http://a.example/web/20041209192926{mode}/http://b/c.png");
            let r = derive_uri_r(&uri, RewriteProfile::Wayback).unwrap();
            assert_eq!(r.as_str(), "http://b/c.png", "mode {mode}");
        }
    }

    #[test]
    fn identity_profile_returns_input() {
        let r = derive_uri_r("http://x/y", RewriteProfile::Identity).unwrap();
        assert_eq!(r.as_str(), "http://x/y");
    }

    #[test]
    fn non_rewritten_uris_error_under_wayback() {
        for uri in [
            "http://example.com/plain/page.html",
            "http://a.example/web/2004/http://b/",     // short stamp
            "http://a.example/web/20041209192926",     // no remainder
            "http://a.example/other/20041209192926/http://b/", // wrong prefix
        ] {
            assert!(
                matches!(
                    derive_uri_r(uri, RewriteProfile::Wayback),
                    Err(ArchiveError::NonRewrittenUri(_))
                ),
                "uri {uri}"
            );
        }
    }

    #[test]
    fn parts_expose_stamp_and_archive() {
        let parts =
            replay_parts("http://a.example/web/20041209192926im_/http://b/c.png").unwrap();
        assert_eq!(parts.archive_prefix, "http://a.example");
        assert_eq!(parts.stamp, "20041209192926");
        assert_eq!(parts.mode, "im_");
        assert_eq!(parts.uri_r, "http://b/c.png");
    }
}
