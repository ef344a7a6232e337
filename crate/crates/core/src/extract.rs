//! Embedded-resource extraction: the set of original resources a memento's
//! representation pulls in when rendered.

use std::collections::HashMap;

use scraper::{Html, Selector};
use std::sync::LazyLock;

use crate::archive::rewrite::{derive_uri_r, RewriteProfile};
use crate::model::OriginalResourceRef;

/// What kind of representation was extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionKind {
    Html,
    Css,
    /// Leaf media (images, scripts we do not parse, unknown types): embeds
    /// nothing.
    Opaque,
}

/// One embedded resource reference, in first-seen document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedResource {
    pub resource: OriginalResourceRef,
    /// Whether the resource's own representation must be extracted in turn
    /// (frames, iframes, stylesheets).
    pub recursable: bool,
}

/// Everything one representation embeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub resources: Vec<ExtractedResource>,
    pub kind: ExtractionKind,
}

impl ExtractionResult {
    fn opaque() -> Self {
        ExtractionResult {
            resources: Vec::new(),
            kind: ExtractionKind::Opaque,
        }
    }
}

/// Extract the original resources embedded in a representation.
///
/// HTML is parsed tolerantly (parse errors never fail extraction); CSS is
/// scanned for `url(...)` and `@import`; all other media types embed
/// nothing. References are resolved against `base_uri`, de-rewritten back to
/// URI-Rs, and de-duplicated preserving first-seen order.
pub fn extract_embedded(
    body: &[u8],
    media_type: Option<&str>,
    base_uri: &str,
    rewrite: RewriteProfile,
) -> ExtractionResult {
    let essence = media_type
        .map(|m| m.split(';').next().unwrap_or("").trim().to_ascii_lowercase())
        .unwrap_or_default();
    match essence.as_str() {
        "text/html" | "application/xhtml+xml" => extract_from_html(body, base_uri, rewrite),
        "text/css" => extract_from_css(body, base_uri, rewrite),
        _ => ExtractionResult::opaque(),
    }
}

struct Collector {
    base: Option<url::Url>,
    rewrite: RewriteProfile,
    seen: HashMap<String, usize>,
    resources: Vec<ExtractedResource>,
}

impl Collector {
    fn new(base_uri: &str, rewrite: RewriteProfile) -> Self {
        Collector {
            base: url::Url::parse(base_uri).ok(),
            rewrite,
            seen: HashMap::new(),
            resources: Vec::new(),
        }
    }

    fn add(&mut self, reference: &str, recursable: bool) {
        let reference = reference.trim();
        if reference.is_empty()
            || reference.starts_with('#')
            || has_scheme(reference, &["data", "javascript", "mailto", "about"])
        {
            return;
        }
        let Some(base) = &self.base else { return };
        let Ok(absolute) = base.join(reference) else { return };
        let absolute = absolute.to_string();
        // Rewritten replay URLs are mapped back to their URI-R; anything
        // non-rewritten is taken to already be one.
        let resource = match derive_uri_r(&absolute, self.rewrite) {
            Ok(r) => r,
            Err(_) => match OriginalResourceRef::parse(&absolute) {
                Ok(r) => r,
                Err(_) => return,
            },
        };
        match self.seen.get(resource.as_str()) {
            Some(&idx) => {
                // A later recursable sighting upgrades the earlier one.
                self.resources[idx].recursable |= recursable;
            }
            None => {
                self.seen.insert(resource.as_str().to_string(), self.resources.len());
                self.resources.push(ExtractedResource {
                    resource,
                    recursable,
                });
            }
        }
    }
}

fn has_scheme(reference: &str, schemes: &[&str]) -> bool {
    schemes.iter().any(|s| {
        reference.len() > s.len()
            && reference.as_bytes()[s.len()] == b':'
            && reference[..s.len()].eq_ignore_ascii_case(s)
    })
}

static ALL_ELEMENTS: LazyLock<Selector> = LazyLock::new(|| Selector::parse("*").unwrap());

fn extract_from_html(body: &[u8], base_uri: &str, rewrite: RewriteProfile) -> ExtractionResult {
    let text = String::from_utf8_lossy(body);
    let document = Html::parse_document(&text);
    let mut collector = Collector::new(base_uri, rewrite);

    for element in document.select(&ALL_ELEMENTS) {
        let el = element.value();
        match el.name() {
            "img" | "embed" => {
                if let Some(src) = el.attr("src") {
                    collector.add(src, false);
                }
            }
            "script" => {
                if let Some(src) = el.attr("src") {
                    collector.add(src, false);
                }
            }
            "input" => {
                if el.attr("type").is_some_and(|t| t.eq_ignore_ascii_case("image")) {
                    if let Some(src) = el.attr("src") {
                        collector.add(src, false);
                    }
                }
            }
            "link" => {
                let is_stylesheet = el
                    .attr("rel")
                    .is_some_and(|rel| rel.split_whitespace().any(|r| r.eq_ignore_ascii_case("stylesheet")));
                if is_stylesheet {
                    if let Some(href) = el.attr("href") {
                        collector.add(href, true);
                    }
                }
            }
            "frame" | "iframe" => {
                if let Some(src) = el.attr("src") {
                    collector.add(src, true);
                }
            }
            "object" => {
                if let Some(data) = el.attr("data") {
                    collector.add(data, false);
                }
            }
            "body" => {
                if let Some(background) = el.attr("background") {
                    collector.add(background, false);
                }
            }
            "style" => {
                let css: String = element.text().collect();
                collect_css(&css, &mut collector);
            }
            _ => {}
        }
        if let Some(style) = el.attr("style") {
            for target in css_urls(style) {
                collector.add(&target, false);
            }
        }
    }

    ExtractionResult {
        resources: collector.resources,
        kind: ExtractionKind::Html,
    }
}

fn extract_from_css(body: &[u8], base_uri: &str, rewrite: RewriteProfile) -> ExtractionResult {
    let text = String::from_utf8_lossy(body);
    let mut collector = Collector::new(base_uri, rewrite);
    collect_css(&text, &mut collector);
    ExtractionResult {
        resources: collector.resources,
        kind: ExtractionKind::Css,
    }
}

fn collect_css(css: &str, collector: &mut Collector) {
    for target in css_imports(css) {
        collector.add(&target, true);
    }
    for target in css_urls(css) {
        collector.add(&target, false);
    }
}

/// Targets of `url(...)` tokens, quotes stripped.
fn css_urls(css: &str) -> Vec<String> {
    let mut out = Vec::new();
    let lower = css.to_ascii_lowercase();
    let mut from = 0;
    while let Some(at) = lower[from..].find("url(") {
        let start = from + at + 4;
        match css[start..].find(')') {
            Some(close) => {
                out.push(unquote(&css[start..start + close]).to_string());
                from = start + close + 1;
            }
            None => break,
        }
    }
    out
}

/// Targets of `@import` rules, both the string and the `url()` forms.
fn css_imports(css: &str) -> Vec<String> {
    let mut out = Vec::new();
    let lower = css.to_ascii_lowercase();
    let mut from = 0;
    while let Some(at) = lower[from..].find("@import") {
        let rest_start = from + at + "@import".len();
        let rest = css[rest_start..].trim_start();
        let target = if let Some(stripped) = rest.strip_prefix("url(") {
            stripped.split(')').next().map(unquote)
        } else if rest.starts_with('"') || rest.starts_with('\'') {
            let quote = rest.as_bytes()[0] as char;
            rest[1..].split(quote).next()
        } else {
            None
        };
        if let Some(target) = target {
            out.push(target.trim().to_string());
        }
        from = rest_start;
    }
    out
}

fn unquote(s: &str) -> &str {
    s.trim().trim_matches(|c| c == '"' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "http://a.example/web/20041209192926/http://www.example.com/page.html";

    fn uris(result: &ExtractionResult) -> Vec<&str> {
        result.resources.iter().map(|r| r.resource.as_str()).collect()
    }

    #[test]
    fn duplicate_images_collapse_preserving_order() {
        let html = br#"<html><body>
            <img src="http://a.example/web/20041209192926im_/http://img.example/one.gif">
            <img src="http://img.example/two.gif">
            <img src="http://a.example/web/20041209192926im_/http://img.example/one.gif">
        </body></html>"#;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(result.kind, ExtractionKind::Html);
        assert_eq!(
            uris(&result),
            vec!["http://img.example/one.gif", "http://img.example/two.gif"]
        );
    }

    #[test]
    fn frames_and_stylesheets_are_recursable() {
        let html = br#"<html><head>
            <link rel="stylesheet" href="/web/20041209192926cs_/http://www.example.com/style.css">
            </head><body>
            <iframe src="http://www.example.com/frame.html"></iframe>
            <img src="http://img.example/pic.jpg">
        </body></html>"#;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        let recursable: Vec<&str> = result
            .resources
            .iter()
            .filter(|r| r.recursable)
            .map(|r| r.resource.as_str())
            .collect();
        assert_eq!(
            recursable,
            vec![
                "http://www.example.com/style.css",
                "http://www.example.com/frame.html"
            ]
        );
        assert_eq!(result.resources.len(), 3);
    }

    #[test]
    fn binary_media_is_opaque() {
        let result = extract_embedded(b"GIF89a...", Some("image/gif"), BASE, RewriteProfile::Wayback);
        assert_eq!(result.kind, ExtractionKind::Opaque);
        assert!(result.resources.is_empty());
    }

    #[test]
    fn relative_references_resolve_through_replay_paths() {
        let html = br#"<img src="logo.gif"><img src="/web/20041209192926im_/http://cdn.example/x.png">"#;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(
            uris(&result),
            vec!["http://www.example.com/logo.gif", "http://cdn.example/x.png"]
        );
    }

    #[test]
    fn skips_unarchivable_schemes_and_fragments() {
        let html = br##"
            <img src="data:image/gif;base64,R0lGOD">
            <img src="javascript:void(0)">
            <img src="#frag">
            <img src="">
            <img src="http://ok.example/x.gif">
        "##;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(uris(&result), vec!["http://ok.example/x.gif"]);
    }

    #[test]
    fn css_urls_and_imports() {
        let css = br#"
            @import "http://www.example.com/base.css";
            @import url('http://www.example.com/extra.css');
            body { background: url("http://img.example/bg.png") no-repeat; }
        "#;
        let result = extract_embedded(css, Some("text/css"), BASE, RewriteProfile::Wayback);
        assert_eq!(result.kind, ExtractionKind::Css);
        let recursable: Vec<bool> = result.resources.iter().map(|r| r.recursable).collect();
        assert_eq!(
            uris(&result),
            vec![
                "http://www.example.com/base.css",
                "http://www.example.com/extra.css",
                "http://img.example/bg.png"
            ]
        );
        assert_eq!(recursable, vec![true, true, false]);
    }

    #[test]
    fn inline_style_and_style_element() {
        let html = br#"<html><head><style>h1 { background: url(http://img.example/h1.png); }</style></head>
            <body><div style="background-image: url('http://img.example/div.png')">x</div></body></html>"#;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(
            uris(&result),
            vec!["http://img.example/h1.png", "http://img.example/div.png"]
        );
    }

    #[test]
    fn tolerates_malformed_markup() {
        let html = b"<html><body><img src=http://img.example/a.gif <p>< broken";
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(result.kind, ExtractionKind::Html);
    }

    #[test]
    fn entity_escaped_attributes_decode() {
        let html = br#"<img src="http://banners.example/cgi-bin/b?zip=50593&amp;width=150">"#;
        let result = extract_embedded(html, Some("text/html"), BASE, RewriteProfile::Wayback);
        assert_eq!(uris(&result), vec!["http://banners.example/cgi-bin/b?zip=50593&width=150"]);
    }
}
