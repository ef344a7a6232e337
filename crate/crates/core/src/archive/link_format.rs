//! RFC 7089 timemap wire format: `application/link-format` parsing and
//! serialization.

use crate::datetime::parse_http_datetime;
use crate::error::ArchiveError;
use crate::model::MementoRecord;

/// One link-value: a target URI plus its parameters in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub target: String,
    pub params: Vec<(String, String)>,
}

impl Link {
    pub fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// Relation types, split on whitespace per RFC 8288.
    pub fn rel_values(&self) -> Vec<&str> {
        self.param("rel").map_or_else(Vec::new, |rel| rel.split_whitespace().collect())
    }

    pub fn has_rel(&self, value: &str) -> bool {
        self.rel_values().iter().any(|r| r.eq_ignore_ascii_case(value))
    }
}

/// Parse an `application/link-format` document into link-values.
pub fn parse_link_format(input: &str) -> Result<Vec<Link>, ArchiveError> {
    let mut links = Vec::new();
    let bytes = input.as_bytes();
    let mut pos = 0;

    skip_ws(bytes, &mut pos);
    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            return Err(malformed(format!("expected '<' at offset {pos}")));
        }
        pos += 1;
        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'>' {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(malformed("unterminated URI reference".to_string()));
        }
        let target = input[start..pos].to_string();
        pos += 1;

        let mut params = Vec::new();
        loop {
            skip_ws(bytes, &mut pos);
            match bytes.get(pos) {
                Some(b';') => {
                    pos += 1;
                    let (name, value) = parse_param(input, bytes, &mut pos)?;
                    params.push((name, value));
                }
                Some(b',') => {
                    pos += 1;
                    skip_ws(bytes, &mut pos);
                    break;
                }
                None => break,
                Some(other) => {
                    return Err(malformed(format!(
                        "unexpected byte {:?} at offset {pos}",
                        char::from(*other)
                    )))
                }
            }
        }
        links.push(Link { target, params });
    }
    Ok(links)
}

fn parse_param(input: &str, bytes: &[u8], pos: &mut usize) -> Result<(String, String), ArchiveError> {
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && !matches!(bytes[*pos], b'=' | b';' | b',') {
        *pos += 1;
    }
    let name = input[start..*pos].trim().to_string();
    if name.is_empty() {
        return Err(malformed(format!("empty parameter name at offset {start}")));
    }
    if bytes.get(*pos) != Some(&b'=') {
        // Valueless parameter (e.g. `; crossorigin`).
        return Ok((name, String::new()));
    }
    *pos += 1;
    skip_ws(bytes, pos);
    if bytes.get(*pos) == Some(&b'"') {
        *pos += 1;
        let mut value = String::new();
        loop {
            match bytes.get(*pos) {
                Some(b'"') => {
                    *pos += 1;
                    break;
                }
                Some(b'\\') => {
                    *pos += 1;
                    match bytes.get(*pos) {
                        Some(&c) => {
                            value.push(char::from(c));
                            *pos += 1;
                        }
                        None => return Err(malformed("unterminated quoted string".to_string())),
                    }
                }
                Some(&c) => {
                    value.push(char::from(c));
                    *pos += 1;
                }
                None => return Err(malformed("unterminated quoted string".to_string())),
            }
        }
        Ok((name, value))
    } else {
        let start = *pos;
        while *pos < bytes.len() && !matches!(bytes[*pos], b';' | b',') {
            *pos += 1;
        }
        Ok((name, input[start..*pos].trim().to_string()))
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn malformed(msg: String) -> ArchiveError {
    ArchiveError::MalformedTimemap(msg)
}

/// Serialize link-values back to `application/link-format`; all parameter
/// values are quoted, entries separated by `,\n`.
pub fn serialize_link_format(links: &[Link]) -> String {
    let mut out = String::new();
    for (i, link) in links.iter().enumerate() {
        if i > 0 {
            out.push_str(",\n");
        }
        out.push('<');
        out.push_str(&link.target);
        out.push('>');
        for (name, value) in &link.params {
            out.push_str("; ");
            out.push_str(name);
            out.push_str("=\"");
            for c in value.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
    }
    out.push('\n');
    out
}

/// The timemap content extracted from a link-format document.
#[derive(Debug, Clone, Default)]
pub struct TimemapDocument {
    /// Target of the `rel="original"` entry.
    pub original: Option<String>,
    /// Target of the `rel="self"`/`rel="timemap"` entry.
    pub timemap_uri: Option<String>,
    /// Memento records in source order, headers-only.
    pub mementos: Vec<MementoRecord>,
}

/// Interpret parsed link-values as a timemap.
///
/// Entries whose rel contains `memento` become records when their `datetime`
/// attribute decodes; entries without a decodable capture datetime are
/// dropped with a warning, never fabricated.
pub fn interpret_timemap(links: &[Link]) -> TimemapDocument {
    let mut doc = TimemapDocument::default();
    for link in links {
        if link.has_rel("original") {
            doc.original.get_or_insert_with(|| link.target.clone());
        }
        if link.has_rel("self") || link.has_rel("timemap") {
            doc.timemap_uri.get_or_insert_with(|| link.target.clone());
        }
        if link.has_rel("memento") {
            match link.param("datetime").map(parse_http_datetime) {
                Some(field) => match field.as_defined() {
                    Some(dt) => doc.mementos.push(MementoRecord::new(&link.target, dt.clone())),
                    None => log::warn!(
                        "dropping memento {} with undecodable datetime {:?}",
                        link.target,
                        link.param("datetime")
                    ),
                },
                None => log::warn!("dropping memento {} without datetime attribute", link.target),
            }
        }
    }
    doc
}
