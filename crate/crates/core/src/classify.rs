//! Temporal-coherence classification of embedded mementos relative to a
//! root memento.
//!
//! Every embedded resource lands in exactly one of twenty patterns, each
//! mapped to a fixed coherence state. The deciding evidence is the
//! arrangement of the resource's capture datetimes around the root's
//! capture datetime, the deciding memento's Last-Modified, and (optionally)
//! entity-body content.

use crate::datetime::{validate_last_modified, ArchivalDatetime, DatetimeField};
use crate::model::{
    CompositeMemento, MementoFlag, MementoRecord, OriginalResourceRef, Resolution,
    ResolutionEntry, TimeMapRecord,
};
use crate::similarity::{evaluate_relation, ContentRelation, SimilarityPolicy};

/// The twenty coherence patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternCode {
    /// Right bracket: captured after the root, modified on or before it.
    OneRB,
    /// Right with newer Last-Modified.
    OneRN,
    /// Right with undefined Last-Modified.
    OneRU,
    /// Left with Last-Modified present.
    OneLL,
    /// Left with undefined Last-Modified.
    OneLU,
    /// Captured simultaneously with the root.
    OneEQ,
    /// Two-memento bracket.
    TwoB,
    /// Two-memento newer Last-Modified.
    TwoN,
    /// Two-memento undefined Last-Modified.
    TwoU,
    /// Content-equal refinements of the two-memento patterns.
    TwoEB,
    TwoEN,
    TwoEU,
    /// Content-similar refinements.
    TwoSB,
    TwoSN,
    TwoSU,
    /// Content-not-similar refinements.
    TwoNB,
    TwoNN,
    TwoNU,
    /// Root embeds nothing: inherently coherent.
    ZeroNE,
    /// Resource not archived (or no usable mementos).
    ZeroNA,
}

impl PatternCode {
    pub const ALL: [PatternCode; 20] = [
        PatternCode::OneRB,
        PatternCode::OneRN,
        PatternCode::OneRU,
        PatternCode::OneLL,
        PatternCode::OneLU,
        PatternCode::OneEQ,
        PatternCode::TwoB,
        PatternCode::TwoN,
        PatternCode::TwoU,
        PatternCode::TwoEB,
        PatternCode::TwoEN,
        PatternCode::TwoEU,
        PatternCode::TwoSB,
        PatternCode::TwoSN,
        PatternCode::TwoSU,
        PatternCode::TwoNB,
        PatternCode::TwoNN,
        PatternCode::TwoNU,
        PatternCode::ZeroNE,
        PatternCode::ZeroNA,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PatternCode::OneRB => "1RB",
            PatternCode::OneRN => "1RN",
            PatternCode::OneRU => "1RU",
            PatternCode::OneLL => "1LL",
            PatternCode::OneLU => "1LU",
            PatternCode::OneEQ => "1EQ",
            PatternCode::TwoB => "2B",
            PatternCode::TwoN => "2N",
            PatternCode::TwoU => "2U",
            PatternCode::TwoEB => "2EB",
            PatternCode::TwoEN => "2EN",
            PatternCode::TwoEU => "2EU",
            PatternCode::TwoSB => "2SB",
            PatternCode::TwoSN => "2SN",
            PatternCode::TwoSU => "2SU",
            PatternCode::TwoNB => "2NB",
            PatternCode::TwoNN => "2NN",
            PatternCode::TwoNU => "2NU",
            PatternCode::ZeroNE => "0NE",
            PatternCode::ZeroNA => "0NA",
        }
    }

    /// The fixed pattern-to-state mapping.
    pub fn state(&self) -> CoherenceState {
        match self {
            PatternCode::OneRB => CoherenceState::Coherent,
            PatternCode::OneRN => CoherenceState::Violative,
            PatternCode::OneRU => CoherenceState::ProbablyViolative,
            PatternCode::OneLL => CoherenceState::PossiblyCoherent,
            PatternCode::OneLU => CoherenceState::ProbablyViolative,
            PatternCode::OneEQ => CoherenceState::Coherent,
            PatternCode::TwoB => CoherenceState::Coherent,
            PatternCode::TwoN => CoherenceState::Violative,
            PatternCode::TwoU => CoherenceState::ProbablyViolative,
            PatternCode::TwoEB | PatternCode::TwoEN | PatternCode::TwoEU => CoherenceState::Coherent,
            PatternCode::TwoSB | PatternCode::TwoSN | PatternCode::TwoSU => CoherenceState::Coherent,
            PatternCode::TwoNB => CoherenceState::Coherent,
            PatternCode::TwoNN => CoherenceState::Violative,
            PatternCode::TwoNU => CoherenceState::ProbablyViolative,
            PatternCode::ZeroNE => CoherenceState::Coherent,
            PatternCode::ZeroNA => CoherenceState::CoherenceUndefined,
        }
    }
}

impl std::fmt::Display for PatternCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five coherence states, ordered by favorability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoherenceState {
    /// Prima facie coherent (C).
    Coherent,
    /// Prima facie violative (V).
    Violative,
    /// Possibly coherent (PC).
    PossiblyCoherent,
    /// Probably violative (PV).
    ProbablyViolative,
    /// Coherence undefined (CU).
    CoherenceUndefined,
}

impl CoherenceState {
    pub const ALL: [CoherenceState; 5] = [
        CoherenceState::Coherent,
        CoherenceState::Violative,
        CoherenceState::PossiblyCoherent,
        CoherenceState::ProbablyViolative,
        CoherenceState::CoherenceUndefined,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CoherenceState::Coherent => "C",
            CoherenceState::Violative => "V",
            CoherenceState::PossiblyCoherent => "PC",
            CoherenceState::ProbablyViolative => "PV",
            CoherenceState::CoherenceUndefined => "CU",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CoherenceState::Coherent => "prima facie coherent",
            CoherenceState::Violative => "prima facie violative",
            CoherenceState::PossiblyCoherent => "possibly coherent",
            CoherenceState::ProbablyViolative => "probably violative",
            CoherenceState::CoherenceUndefined => "coherence undefined",
        }
    }

    /// Favorability rank: higher is more favorable. Unknown ranks above
    /// probably-violative.
    pub fn favorability_rank(&self) -> u8 {
        match self {
            CoherenceState::Coherent => 4,
            CoherenceState::PossiblyCoherent => 3,
            CoherenceState::CoherenceUndefined => 2,
            CoherenceState::ProbablyViolative => 1,
            CoherenceState::Violative => 0,
        }
    }
}

impl std::fmt::Display for CoherenceState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether entity bodies participate in classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMode {
    HeadersOnly,
    WithContent,
}

/// The evidence a verdict was derived from.
#[derive(Debug, Clone, Default)]
pub struct Evidence {
    /// Capture datetime of the left memento considered, if any.
    pub t_left: Option<ArchivalDatetime>,
    /// Capture datetime of the right memento considered, if any.
    pub t_right: Option<ArchivalDatetime>,
    /// Capture datetime of a simultaneous capture, if any.
    pub t_equal: Option<ArchivalDatetime>,
    /// Last-Modified of the deciding memento, if one was consulted.
    pub lm_used: Option<DatetimeField>,
    /// Content relation of the two-memento pair, when evaluated.
    pub content_relation: Option<ContentRelation>,
    /// Deciding memento carried the dynamic-representation flag.
    pub dynamic_suspect: bool,
}

/// Classification of one embedded resource.
#[derive(Debug, Clone)]
pub struct CoherenceVerdict {
    pub resource: OriginalResourceRef,
    pub pattern: PatternCode,
    pub state: CoherenceState,
    pub evidence: Evidence,
    /// A missing-memento fallback was taken.
    pub degraded: bool,
    /// Colliding capture datetimes classified differently; the least
    /// favorable state was kept.
    pub collision_resolved: bool,
    /// Annotation for verdicts produced from inconsistent inputs.
    pub note: Option<String>,
}

impl CoherenceVerdict {
    fn new(resource: OriginalResourceRef, pattern: PatternCode, evidence: Evidence) -> Self {
        CoherenceVerdict {
            resource,
            pattern,
            state: pattern.state(),
            evidence,
            degraded: false,
            collision_resolved: false,
            note: None,
        }
    }
}

/// Classify one embedded resource against the root memento.
///
/// `tm` must be sorted (timemap construction guarantees it) and its records'
/// Last-Modified values validated, which fetching guarantees. The procedure
/// is total: every input yields exactly one pattern.
pub fn classify(
    root: &MementoRecord,
    entry: &ResolutionEntry,
    tm: &TimeMapRecord,
    mode: EvaluationMode,
    sim: &SimilarityPolicy,
) -> CoherenceVerdict {
    let t0 = root.memento_datetime.epoch_seconds();
    let resource = entry.resource.clone();

    // Live-web redirects are "as if the URI-R has no mementos".
    let usable: Vec<&MementoRecord> = tm
        .mementos()
        .iter()
        .filter(|m| !m.has_flag(MementoFlag::LiveWebRedirect))
        .collect();

    if entry.resolution == Resolution::NotArchived || usable.is_empty() {
        return CoherenceVerdict::new(resource, PatternCode::ZeroNA, Evidence::default());
    }

    // Simultaneous capture trumps everything else; it needs no headers.
    if let Some(eq) = usable.iter().find(|m| m.epoch() == t0) {
        let evidence = Evidence {
            t_equal: Some(eq.memento_datetime.clone()),
            dynamic_suspect: eq.has_flag(MementoFlag::DynamicSuspect),
            ..Evidence::default()
        };
        return CoherenceVerdict::new(resource, PatternCode::OneEQ, evidence);
    }

    let lefts: Vec<&MementoRecord> = usable.iter().copied().filter(|m| m.epoch() < t0).collect();
    let rights: Vec<&MementoRecord> = usable.iter().copied().filter(|m| m.epoch() > t0).collect();

    match (lefts.is_empty(), rights.is_empty()) {
        (false, false) => classify_pair(resource, t0, &lefts, &rights, mode, sim),
        (true, false) => classify_pure_right(resource, t0, &rights, false),
        (false, true) => classify_pure_left(resource, &lefts, false),
        (true, true) => {
            // Unreachable: usable is non-empty and nothing is left, right,
            // or equal. Produce an annotated undefined verdict rather than
            // aborting a batch.
            let mut v = CoherenceVerdict::new(resource, PatternCode::ZeroNA, Evidence::default());
            v.note = Some("inconsistent timemap partition".to_string());
            v
        }
    }
}

// Group mementos sharing the same capture datetime; within a group each
// retrievable memento is classified separately and collisions resolve to the
// least favorable state.
fn collision_groups<'a>(mementos: &[&'a MementoRecord]) -> Vec<Vec<&'a MementoRecord>> {
    let mut groups: Vec<Vec<&MementoRecord>> = Vec::new();
    for m in mementos {
        match groups.last_mut() {
            Some(group) if group[0].epoch() == m.epoch() => group.push(m),
            _ => groups.push(vec![m]),
        }
    }
    groups
}

fn retrievable<'a>(group: &[&'a MementoRecord]) -> Vec<&'a MementoRecord> {
    group.iter().copied().filter(|m| m.is_retrievable()).collect()
}

// Pick the least favorable among candidate verdicts, marking collision
// resolution when they disagree.
fn resolve_collisions(mut candidates: Vec<CoherenceVerdict>) -> CoherenceVerdict {
    debug_assert!(!candidates.is_empty());
    let disagree = candidates
        .iter()
        .any(|c| (c.pattern, c.state) != (candidates[0].pattern, candidates[0].state));
    let mut worst = candidates.remove(0);
    for c in candidates {
        if c.state.favorability_rank() < worst.state.favorability_rank() {
            worst = c;
        }
    }
    worst.collision_resolved = disagree;
    worst
}

// The newest retrievable capture decides a pure-left pattern; unretrievable
// newer captures are skipped inward-out.
fn classify_pure_left(
    resource: OriginalResourceRef,
    lefts: &[&MementoRecord],
    forced_degraded: bool,
) -> CoherenceVerdict {
    let mut skipped = false;
    for group in collision_groups(lefts).into_iter().rev() {
        let candidates = retrievable(&group);
        if candidates.is_empty() {
            skipped = true;
            continue;
        }
        let verdicts = candidates
            .into_iter()
            .map(|m| {
                let lm = effective_last_modified(m);
                let pattern = if lm.is_defined() {
                    PatternCode::OneLL
                } else {
                    PatternCode::OneLU
                };
                let evidence = Evidence {
                    t_left: Some(m.memento_datetime.clone()),
                    lm_used: Some(lm),
                    dynamic_suspect: m.has_flag(MementoFlag::DynamicSuspect),
                    ..Evidence::default()
                };
                CoherenceVerdict::new(resource.clone(), pattern, evidence)
            })
            .collect();
        let mut verdict = resolve_collisions(verdicts);
        verdict.degraded = skipped || forced_degraded;
        return verdict;
    }
    degraded_not_available(resource)
}

// The oldest retrievable capture decides a pure-right pattern.
fn classify_pure_right(
    resource: OriginalResourceRef,
    t0: i64,
    rights: &[&MementoRecord],
    forced_degraded: bool,
) -> CoherenceVerdict {
    let mut skipped = false;
    for group in collision_groups(rights) {
        let candidates = retrievable(&group);
        if candidates.is_empty() {
            skipped = true;
            continue;
        }
        let verdicts = candidates
            .into_iter()
            .map(|m| {
                let lm = effective_last_modified(m);
                let pattern = right_pattern(&lm, t0, RightFamily::OneMemento);
                let evidence = Evidence {
                    t_right: Some(m.memento_datetime.clone()),
                    lm_used: Some(lm),
                    dynamic_suspect: m.has_flag(MementoFlag::DynamicSuspect),
                    ..Evidence::default()
                };
                CoherenceVerdict::new(resource.clone(), pattern, evidence)
            })
            .collect();
        let mut verdict = resolve_collisions(verdicts);
        verdict.degraded = skipped || forced_degraded;
        return verdict;
    }
    degraded_not_available(resource)
}

enum RightFamily {
    OneMemento,
    TwoMemento,
}

// Shared Last-Modified branching for the right-sided families: a defined
// Last-Modified on or before the root's capture brackets it.
fn right_pattern(lm: &DatetimeField, t0: i64, family: RightFamily) -> PatternCode {
    match (lm.as_defined(), family) {
        (Some(l), RightFamily::OneMemento) if l.epoch_seconds() <= t0 => PatternCode::OneRB,
        (Some(_), RightFamily::OneMemento) => PatternCode::OneRN,
        (None, RightFamily::OneMemento) => PatternCode::OneRU,
        (Some(l), RightFamily::TwoMemento) if l.epoch_seconds() <= t0 => PatternCode::TwoB,
        (Some(_), RightFamily::TwoMemento) => PatternCode::TwoN,
        (None, RightFamily::TwoMemento) => PatternCode::TwoU,
    }
}

// Consecutive pair around the root: the right memento's Last-Modified picks
// the base pattern; content evaluation refines it.
fn classify_pair(
    resource: OriginalResourceRef,
    t0: i64,
    lefts: &[&MementoRecord],
    rights: &[&MementoRecord],
    mode: EvaluationMode,
    sim: &SimilarityPolicy,
) -> CoherenceVerdict {
    let right_group: Vec<&MementoRecord> = {
        let groups = collision_groups(rights);
        groups.into_iter().next().unwrap_or_default()
    };
    let left_group: Vec<&MementoRecord> = {
        let groups = collision_groups(lefts);
        groups.into_iter().next_back().unwrap_or_default()
    };
    let right_candidates = retrievable(&right_group);

    if right_candidates.is_empty() {
        // The right memento of the pair is unavailable: degrade to the
        // one-memento pattern on the side that still has evidence, trying
        // the left side first, then the remaining right captures.
        let left_verdict = classify_pure_left(resource.clone(), lefts, true);
        if left_verdict.pattern != PatternCode::ZeroNA {
            return left_verdict;
        }
        return classify_pure_right(resource, t0, rights, true);
    }

    let mut candidates = Vec::new();
    for right in &right_candidates {
        let lm = effective_last_modified(right);
        let base = right_pattern(&lm, t0, RightFamily::TwoMemento);
        let mut refined = false;
        if mode == EvaluationMode::WithContent {
            if let Some(right_body) = right.body.as_deref() {
                for left in left_group.iter().filter(|l| l.is_retrievable()) {
                    let Some(left_body) = left.body.as_deref() else {
                        continue;
                    };
                    let media = right.media_type.as_deref().or(left.media_type.as_deref());
                    let relation = if right.body_digest.is_some()
                        && right.body_digest == left.body_digest
                    {
                        ContentRelation::Equal
                    } else {
                        evaluate_relation(left_body, right_body, media, sim)
                    };
                    let pattern = refine_with_content(base, relation);
                    let evidence = Evidence {
                        t_left: Some(left.memento_datetime.clone()),
                        t_right: Some(right.memento_datetime.clone()),
                        lm_used: Some(lm.clone()),
                        content_relation: Some(relation),
                        dynamic_suspect: right.has_flag(MementoFlag::DynamicSuspect),
                        ..Evidence::default()
                    };
                    candidates.push(CoherenceVerdict::new(resource.clone(), pattern, evidence));
                    refined = true;
                }
            }
        }
        if !refined {
            let evidence = Evidence {
                t_left: left_group.first().map(|l| l.memento_datetime.clone()),
                t_right: Some(right.memento_datetime.clone()),
                lm_used: Some(lm),
                dynamic_suspect: right.has_flag(MementoFlag::DynamicSuspect),
                ..Evidence::default()
            };
            candidates.push(CoherenceVerdict::new(resource.clone(), base, evidence));
        }
    }
    resolve_collisions(candidates)
}

fn refine_with_content(base: PatternCode, relation: ContentRelation) -> PatternCode {
    match (base, relation) {
        (PatternCode::TwoB, ContentRelation::Equal) => PatternCode::TwoEB,
        (PatternCode::TwoB, ContentRelation::Similar) => PatternCode::TwoSB,
        (PatternCode::TwoB, ContentRelation::NotSimilar) => PatternCode::TwoNB,
        (PatternCode::TwoN, ContentRelation::Equal) => PatternCode::TwoEN,
        (PatternCode::TwoN, ContentRelation::Similar) => PatternCode::TwoSN,
        (PatternCode::TwoN, ContentRelation::NotSimilar) => PatternCode::TwoNN,
        (PatternCode::TwoU, ContentRelation::Equal) => PatternCode::TwoEU,
        (PatternCode::TwoU, ContentRelation::Similar) => PatternCode::TwoSU,
        (PatternCode::TwoU, ContentRelation::NotSimilar) => PatternCode::TwoNU,
        (other, _) => other,
    }
}

// Defensive re-validation; fetching already validates, but classify's
// contract does not depend on it.
fn effective_last_modified(m: &MementoRecord) -> DatetimeField {
    validate_last_modified(m.last_modified.clone(), &m.memento_datetime)
}

// Every capture the resource has turned out unusable.
fn degraded_not_available(resource: OriginalResourceRef) -> CoherenceVerdict {
    let mut v = CoherenceVerdict::new(resource, PatternCode::ZeroNA, Evidence::default());
    v.degraded = true;
    v
}

/// Classify every entry of a composite memento, in discovery order. A
/// composite with no embedded resources yields the single inherently
/// coherent no-embeds verdict.
pub fn classify_composite(
    cm: &CompositeMemento,
    mode: EvaluationMode,
    sim: &SimilarityPolicy,
) -> Vec<CoherenceVerdict> {
    if cm.entries.is_empty() {
        return vec![CoherenceVerdict::new(
            cm.root_resource.clone(),
            PatternCode::ZeroNE,
            Evidence::default(),
        )];
    }
    cm.entries
        .iter()
        .map(|entry| classify(&cm.root, entry, &entry.timemap, mode, sim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Resolution;

    pub(crate) fn dt(epoch: i64) -> ArchivalDatetime {
        ArchivalDatetime::from_epoch_seconds(epoch)
    }

    pub(crate) fn resource() -> OriginalResourceRef {
        OriginalResourceRef::parse("http://embedded.example/r").unwrap()
    }

    pub(crate) fn root_at(epoch: i64) -> MementoRecord {
        MementoRecord::new("http://a.example/web/0/http://root.example/", dt(epoch))
    }

    pub(crate) struct MementoSpec {
        pub epoch: i64,
        pub lm: Option<i64>,
        pub body: Option<Vec<u8>>,
        pub flags: Vec<MementoFlag>,
    }

    impl MementoSpec {
        pub(crate) fn at(epoch: i64) -> Self {
            MementoSpec {
                epoch,
                lm: None,
                body: None,
                flags: Vec::new(),
            }
        }

        pub(crate) fn lm(mut self, epoch: i64) -> Self {
            self.lm = Some(epoch);
            self
        }

        pub(crate) fn body(mut self, body: &[u8]) -> Self {
            self.body = Some(body.to_vec());
            self
        }

        pub(crate) fn flag(mut self, flag: MementoFlag) -> Self {
            self.flags.push(flag);
            self
        }
    }

    pub(crate) fn entry_for(specs: Vec<MementoSpec>) -> (ResolutionEntry, TimeMapRecord) {
        let mementos: Vec<MementoRecord> = specs
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let mut m = MementoRecord::new(
                    format!("http://a.example/web/{i}/http://embedded.example/r"),
                    dt(spec.epoch),
                );
                if let Some(lm) = spec.lm {
                    m.last_modified = DatetimeField::Defined(dt(lm));
                }
                if let Some(body) = &spec.body {
                    m = m.with_body(body.clone());
                    m.media_type = Some("text/html".to_string());
                }
                for f in &spec.flags {
                    m.flags.insert(*f);
                }
                m
            })
            .collect();
        let tm = TimeMapRecord::new(resource(), mementos);
        let resolution = if tm.is_empty() {
            Resolution::NotArchived
        } else {
            Resolution::Resolved
        };
        let entry = ResolutionEntry {
            resource: resource(),
            selected: tm.mementos().first().cloned(),
            left_neighbor: None,
            right_neighbor: None,
            discovery_depth: 1,
            discovered_from: "http://a.example/web/0/http://root.example/".to_string(),
            resolution,
            timemap: tm.clone(),
        };
        (entry, tm)
    }

    pub(crate) fn run(
        t0: i64,
        specs: Vec<MementoSpec>,
        mode: EvaluationMode,
    ) -> CoherenceVerdict {
        let root = root_at(t0);
        let (entry, tm) = entry_for(specs);
        classify(&root, &entry, &tm, mode, &SimilarityPolicy::default())
    }

    #[test]
    fn right_bracket_is_coherent() {
        let v = run(100, vec![MementoSpec::at(110).lm(90)], EvaluationMode::HeadersOnly);
        assert_eq!((v.pattern, v.state), (PatternCode::OneRB, CoherenceState::Coherent));
    }

    #[test]
    fn pair_with_newer_last_modified_is_violative() {
        let v = run(
            100,
            vec![MementoSpec::at(80), MementoSpec::at(110).lm(105)],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::TwoN, CoherenceState::Violative));
    }

    #[test]
    fn equal_bodies_override_undefined_last_modified() {
        let body: &[u8] = b"the very same representation bytes";
        let v = run(
            100,
            vec![MementoSpec::at(80).body(body), MementoSpec::at(110).body(body)],
            EvaluationMode::WithContent,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::TwoEU, CoherenceState::Coherent));
        assert_eq!(v.evidence.content_relation, Some(ContentRelation::Equal));
    }

    #[test]
    fn dissimilar_bodies_keep_undefined_violative() {
        let v = run(
            100,
            vec![
                MementoSpec::at(80).body(b"alpha beta gamma delta epsilon zeta"),
                MementoSpec::at(110).body(b"one two three four five six seven"),
            ],
            EvaluationMode::WithContent,
        );
        assert_eq!(
            (v.pattern, v.state),
            (PatternCode::TwoNU, CoherenceState::ProbablyViolative)
        );
    }

    #[test]
    fn simultaneous_capture_wins() {
        let v = run(
            100,
            vec![MementoSpec::at(80), MementoSpec::at(100), MementoSpec::at(110)],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::OneEQ, CoherenceState::Coherent));
    }

    #[test]
    fn empty_timemap_is_not_archived() {
        let v = run(100, vec![], EvaluationMode::HeadersOnly);
        assert_eq!(
            (v.pattern, v.state),
            (PatternCode::ZeroNA, CoherenceState::CoherenceUndefined)
        );
    }

    #[test]
    fn all_live_web_redirects_are_not_archived() {
        let v = run(
            100,
            vec![
                MementoSpec::at(90).flag(MementoFlag::LiveWebRedirect),
                MementoSpec::at(110).flag(MementoFlag::LiveWebRedirect),
            ],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::ZeroNA, CoherenceState::CoherenceUndefined));
    }

    #[test]
    fn collision_takes_least_favorable_state() {
        // Two captures at the same instant: one brackets (C), one has no
        // Last-Modified (PV). Least favorable wins.
        let v = run(
            100,
            vec![MementoSpec::at(110).lm(90), MementoSpec::at(110)],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::OneRU, CoherenceState::ProbablyViolative));
        assert!(v.collision_resolved);
    }

    #[test]
    fn unretrievable_right_of_pair_degrades_to_left_side() {
        let v = run(
            100,
            vec![
                MementoSpec::at(80).lm(70),
                MementoSpec::at(110).flag(MementoFlag::Unretrievable),
            ],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::OneLL, CoherenceState::PossiblyCoherent));
        assert!(v.degraded);
    }

    #[test]
    fn unretrievable_oldest_right_advances_inward_out() {
        let v = run(
            100,
            vec![
                MementoSpec::at(110).flag(MementoFlag::Unretrievable),
                MementoSpec::at(120).lm(90),
            ],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::OneRB, CoherenceState::Coherent));
        assert!(v.degraded);
    }

    #[test]
    fn everything_unretrievable_is_degraded_undefined() {
        let v = run(
            100,
            vec![MementoSpec::at(110).flag(MementoFlag::Unretrievable)],
            EvaluationMode::HeadersOnly,
        );
        assert_eq!((v.pattern, v.state), (PatternCode::ZeroNA, CoherenceState::CoherenceUndefined));
        assert!(v.degraded);
    }

    #[test]
    fn composite_with_no_entries_is_inherently_coherent() {
        let cm = CompositeMemento {
            root_resource: OriginalResourceRef::parse("http://root.example/").unwrap(),
            root: root_at(100),
            target_datetime: dt(100),
            entries: vec![],
            truncated: vec![],
            heuristic_name: "nearest".to_string(),
        };
        let verdicts = classify_composite(&cm, EvaluationMode::HeadersOnly, &SimilarityPolicy::default());
        assert_eq!(verdicts.len(), 1);
        assert_eq!(verdicts[0].pattern, PatternCode::ZeroNE);
        assert_eq!(verdicts[0].state, CoherenceState::Coherent);
    }

    // Turning on content evaluation never changes the two-memento family,
    // only its refinement, and can change the state only by upgrading to
    // coherent through equality or similarity.
    #[test]
    fn content_evidence_only_refines_pairs() {
        let shared: Vec<String> = (0..200).map(|i| format!("tok{i}")).collect();
        let base = shared.join(" ").into_bytes();
        let similar = {
            let mut tokens = shared.clone();
            tokens[190] = "changed".to_string();
            tokens.join(" ").into_bytes()
        };
        let unrelated = (0..200)
            .map(|i| format!("other{i}"))
            .collect::<Vec<_>>()
            .join(" ")
            .into_bytes();

        for lm in [Some(90i64), Some(105), None] {
            for right_body in [&base, &similar, &unrelated] {
                let specs = |with_bodies: bool| {
                    let mut left = MementoSpec::at(80);
                    let mut right = MementoSpec::at(110);
                    if let Some(lme) = lm {
                        right = right.lm(lme);
                    }
                    if with_bodies {
                        left = left.body(&base);
                        right = right.body(right_body);
                    }
                    vec![left, right]
                };
                let headers = run(100, specs(true), EvaluationMode::HeadersOnly);
                let content = run(100, specs(true), EvaluationMode::WithContent);
                let no_bodies = run(100, specs(false), EvaluationMode::WithContent);

                // Content mode without bodies falls back to the base pattern.
                assert_eq!(no_bodies.pattern, headers.pattern);

                let family = |p: PatternCode| match p {
                    PatternCode::TwoB | PatternCode::TwoEB | PatternCode::TwoSB | PatternCode::TwoNB => "B",
                    PatternCode::TwoN | PatternCode::TwoEN | PatternCode::TwoSN | PatternCode::TwoNN => "N",
                    PatternCode::TwoU | PatternCode::TwoEU | PatternCode::TwoSU | PatternCode::TwoNU => "U",
                    other => panic!("unexpected pattern {other}"),
                };
                assert_eq!(family(content.pattern), family(headers.pattern));
                assert!(
                    content.state == headers.state || content.state == CoherenceState::Coherent,
                    "state may only upgrade to C: {} -> {}",
                    headers.state,
                    content.state
                );
            }
        }
    }

    #[test]
    fn pattern_state_table_is_fixed() {
        use CoherenceState::*;
        use PatternCode::*;
        let expected = [
            (OneRB, Coherent),
            (OneRN, Violative),
            (OneRU, ProbablyViolative),
            (OneLL, PossiblyCoherent),
            (OneLU, ProbablyViolative),
            (OneEQ, Coherent),
            (TwoB, Coherent),
            (TwoN, Violative),
            (TwoU, ProbablyViolative),
            (TwoEB, Coherent),
            (TwoEN, Coherent),
            (TwoEU, Coherent),
            (TwoSB, Coherent),
            (TwoSN, Coherent),
            (TwoSU, Coherent),
            (TwoNB, Coherent),
            (TwoNN, Violative),
            (TwoNU, ProbablyViolative),
            (ZeroNE, Coherent),
            (ZeroNA, CoherenceUndefined),
        ];
        for (pattern, state) in expected {
            assert_eq!(pattern.state(), state, "{pattern}");
        }
    }
}
