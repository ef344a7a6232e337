//! Content evaluation over memento entity bodies: bit-for-bit equality and
//! token-shingle similarity.
//!
//! Archives frequently inject replay chrome (toolbars, banner comments) into
//! text resources while leaving binary resources untouched. Equality is
//! therefore checked first, and text bodies additionally get a similarity
//! measure after configurable strip rules remove injected regions.

use std::borrow::Cow;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::path::Path;

use crate::error::ModelError;

/// One injected region: everything from `begin` through `end` (inclusive)
/// is removed before comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripRule {
    pub begin: Vec<u8>,
    pub end: Vec<u8>,
}

/// A named set of strip rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripProfile {
    pub name: String,
    pub rules: Vec<StripRule>,
}

impl StripProfile {
    /// Rules matching the Wayback Machine's injected toolbar and footer
    /// comment regions.
    pub fn wayback() -> Self {
        StripProfile {
            name: "wayback".to_string(),
            rules: vec![
                StripRule {
                    begin: b"<!-- BEGIN WAYBACK TOOLBAR INSERT -->".to_vec(),
                    end: b"<!-- END WAYBACK TOOLBAR INSERT -->".to_vec(),
                },
                StripRule {
                    begin: b"<!--\n     FILE ARCHIVED ON".to_vec(),
                    end: b"-->".to_vec(),
                },
            ],
        }
    }

    /// The empty profile: compare bodies as-is.
    pub fn none() -> Self {
        StripProfile {
            name: "none".to_string(),
            rules: Vec::new(),
        }
    }

    /// Load a profile from a plain-text file of `begin=`/`end=` line pairs.
    ///
    /// ```text
    /// # toolbar
    /// begin=<!-- BEGIN INSERT -->
    /// end=<!-- END INSERT -->
    /// ```
    pub fn load(name: &str, path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rules = Vec::new();
        let mut pending_begin: Option<Vec<u8>> = None;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if let Some(value) = line.strip_prefix("begin=") {
                if pending_begin.is_some() {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("line {}: begin= without matching end=", lineno + 1),
                    ));
                }
                pending_begin = Some(value.as_bytes().to_vec());
            } else if let Some(value) = line.strip_prefix("end=") {
                match pending_begin.take() {
                    Some(begin) => rules.push(StripRule {
                        begin,
                        end: value.as_bytes().to_vec(),
                    }),
                    None => {
                        return Err(std::io::Error::new(
                            std::io::ErrorKind::InvalidData,
                            format!("line {}: end= without begin=", lineno + 1),
                        ))
                    }
                }
            } else {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("line {}: expected begin= or end=", lineno + 1),
                ));
            }
        }
        if pending_begin.is_some() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "trailing begin= without end=",
            ));
        }
        Ok(StripProfile {
            name: name.to_string(),
            rules,
        })
    }
}

/// Configuration for the similarity measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPolicy {
    pub strip_profiles: Vec<StripProfile>,
    pub shingle_size: usize,
    pub threshold: f64,
    /// Media-type prefixes treated as text (and therefore stripped and
    /// shingled); everything else is binary.
    pub text_media_types: Vec<String>,
}

impl Default for SimilarityPolicy {
    fn default() -> Self {
        SimilarityPolicy {
            strip_profiles: vec![StripProfile::wayback()],
            shingle_size: 4,
            threshold: 0.9,
            text_media_types: vec!["text/".to_string(), "application/xhtml".to_string()],
        }
    }
}

impl SimilarityPolicy {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.shingle_size == 0 {
            return Err(ModelError::InvalidPolicy("shingle_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(ModelError::InvalidPolicy(format!(
                "threshold must be within [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    fn is_text(&self, media_type: Option<&str>) -> bool {
        match media_type {
            Some(mt) => {
                let mt = mt.trim().to_ascii_lowercase();
                self.text_media_types.iter().any(|p| mt.starts_with(p.as_str()))
            }
            None => false,
        }
    }
}

/// How two entity bodies relate once evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentRelation {
    Equal,
    Similar,
    NotSimilar,
}

impl ContentRelation {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContentRelation::Equal => "equal",
            ContentRelation::Similar => "similar",
            ContentRelation::NotSimilar => "not-similar",
        }
    }
}

/// Bit-for-bit equality of two entity bodies.
pub fn bodies_equal(a: &[u8], b: &[u8]) -> bool {
    a == b
}

/// Substantial similarity of two entity bodies.
///
/// Text bodies are stripped of injected regions, tokenized on whitespace,
/// shingled, and compared with the Jaccard index against the policy
/// threshold. Binary bodies are similar only when equal. Never fails:
/// undecodable text is handled at the byte level throughout.
pub fn bodies_similar(a: &[u8], b: &[u8], media_type: Option<&str>, policy: &SimilarityPolicy) -> bool {
    if !policy.is_text(media_type) {
        return bodies_equal(a, b);
    }
    let a = strip_all(a, &policy.strip_profiles);
    let b = strip_all(b, &policy.strip_profiles);
    let sa = shingle_set(&a, policy.shingle_size);
    let sb = shingle_set(&b, policy.shingle_size);
    jaccard_index(&sa, &sb) >= policy.threshold
}

/// Equality first, similarity as the fallback.
pub fn evaluate_relation(
    a: &[u8],
    b: &[u8],
    media_type: Option<&str>,
    policy: &SimilarityPolicy,
) -> ContentRelation {
    if bodies_equal(a, b) {
        ContentRelation::Equal
    } else if bodies_similar(a, b, media_type, policy) {
        ContentRelation::Similar
    } else {
        ContentRelation::NotSimilar
    }
}

/// Remove every region matched by the profiles' rules.
pub fn strip_all<'a>(body: &'a [u8], profiles: &[StripProfile]) -> Cow<'a, [u8]> {
    let mut current = Cow::Borrowed(body);
    for profile in profiles {
        for rule in &profile.rules {
            if rule.begin.is_empty() || rule.end.is_empty() {
                continue;
            }
            if let Some(stripped) = strip_rule(&current, rule) {
                current = Cow::Owned(stripped);
            }
        }
    }
    current
}

// Returns None when the rule matched nothing (avoids copying).
fn strip_rule(body: &[u8], rule: &StripRule) -> Option<Vec<u8>> {
    let mut out: Option<Vec<u8>> = None;
    let mut pos = 0;
    while let Some(begin_at) = find(body, &rule.begin, pos) {
        let after_begin = begin_at + rule.begin.len();
        let Some(end_at) = find(body, &rule.end, after_begin) else {
            break;
        };
        let out = out.get_or_insert_with(|| body[..0].to_vec());
        out.extend_from_slice(&body[pos..begin_at]);
        pos = end_at + rule.end.len();
    }
    let mut out = out?;
    out.extend_from_slice(&body[pos..]);
    Some(out)
}

fn find(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if needle.is_empty() || from > haystack.len() {
        return None;
    }
    haystack[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|i| i + from)
}

/// The shingle set of a byte body: tokens are maximal runs of non-whitespace
/// bytes; shingles are hashes of `k` consecutive tokens. Bodies with fewer
/// than `k` tokens form a single shingle of everything they have.
pub fn shingle_set(body: &[u8], k: usize) -> HashSet<u64> {
    let tokens: Vec<&[u8]> = body
        .split(|b| b.is_ascii_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    let mut set = HashSet::new();
    if tokens.is_empty() {
        return set;
    }
    let k = k.max(1);
    if tokens.len() < k {
        set.insert(hash_tokens(&tokens));
        return set;
    }
    for window in tokens.windows(k) {
        set.insert(hash_tokens(window));
    }
    set
}

fn hash_tokens(tokens: &[&[u8]]) -> u64 {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    for t in tokens {
        t.hash(&mut hasher);
        0xffu8.hash(&mut hasher); // token boundary
    }
    hasher.finish()
}

/// Jaccard index of two shingle sets. Two empty sets are identical bodies
/// as far as tokens are concerned, so the index is 1.
pub fn jaccard_index(a: &HashSet<u64>, b: &HashSet<u64>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}
