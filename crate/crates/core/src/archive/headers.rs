//! Verbatim HTTP header blocks: parsing and interpretation into memento
//! records.

use crate::datetime::{
    check_header_ordering, parse_http_datetime, validate_last_modified, DatetimeField,
    HeaderOrdering, DEFAULT_ORDERING_EPSILON_SECS,
};
use crate::error::ArchiveError;
use crate::model::{MementoFlag, MementoRecord};

/// A parsed header block: status code plus headers in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderBlock {
    pub status: u16,
    pub headers: Vec<(String, String)>,
}

impl HeaderBlock {
    /// First value of a header, case-insensitively.
    pub fn get(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// First value among several alternative header names.
    pub fn get_any(&self, names: &[&str]) -> Option<&str> {
        names.iter().find_map(|n| self.get(n))
    }
}

/// Parse a verbatim header block. The leading `HTTP/x.y NNN ...` status line
/// is optional (missing means 200); lines without a colon are skipped.
pub fn parse_header_block(text: &str) -> Result<HeaderBlock, ArchiveError> {
    let mut status = 200u16;
    let mut headers = Vec::new();
    let mut lines = text.lines().peekable();

    if let Some(first) = lines.peek() {
        if let Some(rest) = first.strip_prefix("HTTP/") {
            let code = rest
                .split_whitespace()
                .nth(1)
                .and_then(|c| c.parse::<u16>().ok())
                .ok_or_else(|| {
                    ArchiveError::MalformedHeaders(format!("bad status line: {first:?}"))
                })?;
            status = code;
            lines.next();
        }
    }

    for line in lines {
        if line.trim().is_empty() {
            break; // end of header block
        }
        match line.split_once(':') {
            Some((name, value)) => headers.push((name.trim().to_string(), value.trim().to_string())),
            None => log::warn!("skipping malformed header line {line:?}"),
        }
    }
    Ok(HeaderBlock { status, headers })
}

// Header names under which archives preserve the original response headers.
const ORIG_LAST_MODIFIED: [&str; 3] = [
    "X-Archive-Orig-Last-Modified",
    "X-Archive-Original-Last-Modified",
    "Last-Modified",
];
const ORIG_DATE: [&str; 2] = ["X-Archive-Orig-Date", "X-Archive-Original-Date"];

/// Build a memento record from a memento response's headers.
///
/// The Memento-Datetime header is required; a response without one is not a
/// memento and is rejected rather than given a fabricated capture datetime.
/// Last-Modified is taken from the archive's preserved original header
/// (falling back to the bare header), validated against the capture
/// datetime, and the dynamic-representation heuristic is applied.
pub fn record_from_headers(
    uri_m: &str,
    block: &HeaderBlock,
    body: Option<Vec<u8>>,
) -> Result<MementoRecord, ArchiveError> {
    let md_raw = block.get("Memento-Datetime").ok_or_else(|| {
        ArchiveError::Fixture(format!("{uri_m}: response lacks a Memento-Datetime header"))
    })?;
    let memento_datetime = match parse_http_datetime(md_raw) {
        DatetimeField::Defined(dt) => dt,
        DatetimeField::Undefined(_) => {
            return Err(ArchiveError::Fixture(format!(
                "{uri_m}: undecodable Memento-Datetime {md_raw:?}"
            )))
        }
    };

    let lm_raw = block.get_any(&ORIG_LAST_MODIFIED);
    let last_modified = match lm_raw {
        Some(raw) => validate_last_modified(parse_http_datetime(raw), &memento_datetime),
        None => DatetimeField::absent(),
    };
    let response_date = match block.get_any(&ORIG_DATE) {
        Some(raw) => parse_http_datetime(raw),
        None => DatetimeField::absent(),
    };

    let mut record = MementoRecord::new(uri_m, memento_datetime);
    record.media_type = block.get("Content-Type").map(str::to_string);
    if check_header_ordering(
        &last_modified,
        &record.memento_datetime,
        &response_date,
        DEFAULT_ORDERING_EPSILON_SECS,
    ) == HeaderOrdering::DynamicSuspect
    {
        record.flags.insert(MementoFlag::DynamicSuspect);
    }
    record.last_modified = last_modified;
    record.response_date = response_date;
    if let Some(body) = body {
        record = record.with_body(body);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datetime::UndefinedReason;

    const STATIC_BLOCK: &str = "HTTP/1.1 200 OK\n\
        Memento-Datetime: Sat, 15 Mar 2008 12:00:00 GMT\n\
        X-Archive-Orig-Last-Modified: Sun, 01 Dec 2002 00:00:00 GMT\n\
        X-Archive-Orig-Date: Sat, 15 Mar 2008 12:00:01 GMT\n\
        Content-Type: text/html\n";

    #[test]
    fn preserved_last_modified_keeps_static_ordering() {
        let block = parse_header_block(STATIC_BLOCK).unwrap();
        let rec = record_from_headers("http://a/m", &block, None).unwrap();
        assert_eq!(rec.memento_datetime.epoch_seconds(), 1_205_582_400);
        assert_eq!(
            rec.last_modified.as_defined().map(|d| d.epoch_seconds()),
            Some(1_038_700_800)
        );
        assert!(!rec.has_flag(MementoFlag::DynamicSuspect));
        assert_eq!(rec.media_type.as_deref(), Some("text/html"));
    }

    #[test]
    fn missing_last_modified_is_dynamic_suspect() {
        let block = parse_header_block(
            "HTTP/1.1 200 OK\nMemento-Datetime: Sat, 15 Mar 2008 12:00:00 GMT\n",
        )
        .unwrap();
        let rec = record_from_headers("http://a/m", &block, None).unwrap();
        assert_eq!(rec.last_modified, DatetimeField::absent());
        assert!(rec.has_flag(MementoFlag::DynamicSuspect));
    }

    #[test]
    fn future_last_modified_becomes_clearly_incorrect() {
        let block = parse_header_block(
            "Memento-Datetime: Thu, 09 Dec 2004 19:29:26 GMT\n\
             X-Archive-Orig-Last-Modified: Sat, 01 Jan 2005 00:00:00 GMT\n",
        )
        .unwrap();
        let rec = record_from_headers("http://a/m", &block, None).unwrap();
        assert_eq!(
            rec.last_modified.undefined_reason(),
            Some(UndefinedReason::ClearlyIncorrect)
        );
    }

    #[test]
    fn memento_datetime_is_required() {
        let block = parse_header_block("Content-Type: image/gif\n").unwrap();
        assert!(record_from_headers("http://a/m", &block, None).is_err());
    }

    #[test]
    fn status_line_optional_and_redirects_carry_status() {
        let plain = parse_header_block("Memento-Datetime: Thu, 09 Dec 2004 19:29:26 GMT\n").unwrap();
        assert_eq!(plain.status, 200);
        let redirect =
            parse_header_block("HTTP/1.1 302 Found\nLocation: http://elsewhere/\n").unwrap();
        assert_eq!(redirect.status, 302);
        assert_eq!(redirect.get("location"), Some("http://elsewhere/"));
    }
}
