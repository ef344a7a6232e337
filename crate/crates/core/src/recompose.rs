//! Recursive recomposition of a composite memento: select a root memento,
//! extract what it embeds, resolve each embedded resource, and repeat for
//! recursable representations.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::archive::{ArchiveClient, FetchOutcome};
use crate::classify::EvaluationMode;
use crate::datetime::ArchivalDatetime;
use crate::error::{ArchiveError, RecomposeError};
use crate::extract::extract_embedded;
use crate::model::{
    CompositeMemento, MementoFlag, MementoRecord, OriginalResourceRef, Resolution,
    ResolutionEntry, TimeMapRecord,
};

/// A named memento-selection strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionHeuristic {
    name: String,
    parameters: BTreeMap<String, String>,
}

impl SelectionHeuristic {
    /// The default strategy: least difference between capture datetime and
    /// target datetime, ties broken toward the earlier capture.
    pub fn nearest() -> Self {
        SelectionHeuristic {
            name: "nearest".to_string(),
            parameters: BTreeMap::new(),
        }
    }

    /// Resolve a strategy by name; unknown names fail at configuration time,
    /// never mid-run.
    pub fn by_name(name: &str) -> Result<Self, RecomposeError> {
        match name {
            "nearest" => Ok(SelectionHeuristic::nearest()),
            other => Err(RecomposeError::UnknownHeuristic(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Traversal bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecomposeLimits {
    pub max_depth: u32,
    pub max_resources: usize,
}

impl Default for RecomposeLimits {
    fn default() -> Self {
        RecomposeLimits {
            max_depth: 3,
            max_resources: 512,
        }
    }
}

impl RecomposeLimits {
    pub fn validate(&self) -> Result<(), RecomposeError> {
        if self.max_depth == 0 || self.max_resources == 0 {
            return Err(RecomposeError::InvalidLimits(
                "max_depth and max_resources must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Recomposition configuration.
#[derive(Debug, Clone)]
pub struct RecomposeOptions {
    pub heuristic: SelectionHeuristic,
    pub limits: RecomposeLimits,
    pub mode: EvaluationMode,
    /// Select embedded mementos at the original target datetime rather than
    /// at the root's capture datetime.
    pub select_at_target: bool,
}

impl Default for RecomposeOptions {
    fn default() -> Self {
        RecomposeOptions {
            heuristic: SelectionHeuristic::nearest(),
            limits: RecomposeLimits::default(),
            mode: EvaluationMode::HeadersOnly,
            select_at_target: false,
        }
    }
}

/// Choose the best memento for a target datetime under a heuristic.
///
/// For `nearest`, no other memento is strictly closer to the target than the
/// returned one; an exact-datetime capture wins outright and equidistant
/// brackets resolve to the earlier capture. Empty timemaps yield nothing.
pub fn select_memento<'a>(
    tm: &'a TimeMapRecord,
    target: &ArchivalDatetime,
    heuristic: &SelectionHeuristic,
) -> Option<&'a MementoRecord> {
    debug_assert_eq!(heuristic.name(), "nearest");
    select_index(tm.mementos(), target, |_| true).map(|i| &tm.mementos()[i])
}

// Nearest-selection over the eligible subset of a sorted memento slice.
fn select_index(
    mementos: &[MementoRecord],
    target: &ArchivalDatetime,
    eligible: impl Fn(&MementoRecord) -> bool,
) -> Option<usize> {
    let t = target.epoch_seconds();
    let mut best: Option<(usize, i64)> = None;
    for (i, m) in mementos.iter().enumerate() {
        if !eligible(m) {
            continue;
        }
        let distance = (m.epoch() - t).abs();
        // Strict < keeps the earliest capture on ties.
        if best.map_or(true, |(_, d)| distance < d) {
            best = Some((i, distance));
        }
    }
    best.map(|(i, _)| i)
}

/// Recompose the composite memento for `root_r` at target datetime `target`.
pub fn recompose(
    client: &ArchiveClient,
    root_r: &OriginalResourceRef,
    target: &ArchivalDatetime,
    options: &RecomposeOptions,
) -> Result<CompositeMemento, RecomposeError> {
    options.limits.validate()?;
    let mut fetcher = CachingFetcher::new(client);

    let root_tm = match fetch_timemap_with_retry(client, root_r) {
        Ok(tm) => tm,
        Err(ArchiveError::TimemapNotFound { .. }) => {
            return Err(RecomposeError::RootNotArchived {
                uri: root_r.as_str().to_string(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    if root_tm.is_empty() {
        return Err(RecomposeError::RootNotArchived {
            uri: root_r.as_str().to_string(),
        });
    }

    let root = fetch_root(&mut fetcher, &root_tm, target, &options.heuristic)?;
    let t0 = root.memento_datetime.clone();
    let selection_pivot = if options.select_at_target {
        target.clone()
    } else {
        t0.clone()
    };

    let mut visited: HashSet<String> = HashSet::new();
    visited.insert(root_r.as_str().to_string());
    let mut queue: VecDeque<Discovery> = VecDeque::new();
    let mut entries: Vec<ResolutionEntry> = Vec::new();
    let mut truncated: Vec<OriginalResourceRef> = Vec::new();

    let root_extraction = extract_embedded(
        root.body.as_deref().unwrap_or_default(),
        root.media_type.as_deref(),
        &root.uri_m,
        client.rewrite_profile(),
    );
    for found in root_extraction.resources {
        if visited.insert(found.resource.as_str().to_string()) {
            queue.push_back(Discovery {
                resource: found.resource,
                depth: 1,
                discovered_from: root.uri_m.clone(),
                recursable: found.recursable,
            });
        }
    }

    while let Some(discovery) = queue.pop_front() {
        if entries.len() >= options.limits.max_resources {
            truncated.push(discovery.resource);
            continue;
        }
        let entry = resolve_entry(&mut fetcher, &discovery, &t0, &selection_pivot, options);

        // Recurse into recursable representations that were actually
        // retrieved, while depth remains.
        if discovery.recursable && discovery.depth < options.limits.max_depth {
            if let Some(selected) = entry
                .selected
                .as_ref()
                .filter(|s| s.body.is_some() && entry.resolution == Resolution::Resolved)
            {
                let extraction = extract_embedded(
                    selected.body.as_deref().unwrap_or_default(),
                    selected.media_type.as_deref(),
                    &selected.uri_m,
                    fetcher.client.rewrite_profile(),
                );
                for found in extraction.resources {
                    if visited.insert(found.resource.as_str().to_string()) {
                        queue.push_back(Discovery {
                            resource: found.resource,
                            depth: discovery.depth + 1,
                            discovered_from: selected.uri_m.clone(),
                            recursable: found.recursable,
                        });
                    }
                }
            }
        }
        entries.push(entry);
    }

    Ok(CompositeMemento {
        root_resource: root_r.clone(),
        root,
        target_datetime: target.clone(),
        entries,
        truncated,
        heuristic_name: options.heuristic.name().to_string(),
    })
}

#[derive(Debug)]
struct Discovery {
    resource: OriginalResourceRef,
    depth: u32,
    discovered_from: String,
    recursable: bool,
}

// One fetch per URI-M per run; a body request upgrades a cached headers-only
// result.
struct CachingFetcher<'a> {
    client: &'a ArchiveClient,
    cache: HashMap<String, (bool, FetchOutcome)>,
}

impl<'a> CachingFetcher<'a> {
    fn new(client: &'a ArchiveClient) -> Self {
        CachingFetcher {
            client,
            cache: HashMap::new(),
        }
    }

    fn fetch(&mut self, uri_m: &str, want_body: bool) -> FetchOutcome {
        if let Some((had_body, outcome)) = self.cache.get(uri_m) {
            if *had_body || !want_body {
                return outcome.clone();
            }
        }
        let outcome = self.client.fetch_memento(uri_m, want_body);
        self.cache
            .insert(uri_m.to_string(), (want_body, outcome.clone()));
        outcome
    }
}

fn fetch_timemap_with_retry(
    client: &ArchiveClient,
    resource: &OriginalResourceRef,
) -> Result<TimeMapRecord, ArchiveError> {
    match client.fetch_timemap(resource) {
        Err(e) if e.is_retryable() => {
            log::warn!("retrying timemap fetch for {resource}: {e}");
            client.fetch_timemap(resource)
        }
        other => other,
    }
}

fn fetch_root(
    fetcher: &mut CachingFetcher,
    root_tm: &TimeMapRecord,
    target: &ArchivalDatetime,
    heuristic: &SelectionHeuristic,
) -> Result<MementoRecord, RecomposeError> {
    debug_assert_eq!(heuristic.name(), "nearest");
    let mut excluded: HashSet<String> = HashSet::new();
    loop {
        let Some(index) = select_index(root_tm.mementos(), target, |m| {
            !excluded.contains(&m.uri_m)
        }) else {
            // Every root capture redirected out to the live web.
            return Err(RecomposeError::RootNotArchived {
                uri: root_tm.resource().as_str().to_string(),
            });
        };
        let uri_m = root_tm.mementos()[index].uri_m.clone();
        match fetcher.fetch(&uri_m, true) {
            FetchOutcome::Ok(record) => return Ok(*record),
            FetchOutcome::Redirected { live_web: true, .. } => {
                excluded.insert(uri_m);
            }
            FetchOutcome::Redirected { to_uri, .. } => {
                return Err(RecomposeError::RootUnretrievable {
                    uri: uri_m,
                    reason: format!("unresolved redirect to {to_uri}"),
                })
            }
            FetchOutcome::Failed { reason } => {
                return Err(RecomposeError::RootUnretrievable { uri: uri_m, reason })
            }
        }
    }
}

fn resolve_entry(
    fetcher: &mut CachingFetcher,
    discovery: &Discovery,
    t0: &ArchivalDatetime,
    selection_pivot: &ArchivalDatetime,
    options: &RecomposeOptions,
) -> ResolutionEntry {
    let resource = discovery.resource.clone();
    let mut entry = ResolutionEntry {
        resource: resource.clone(),
        selected: None,
        left_neighbor: None,
        right_neighbor: None,
        discovery_depth: discovery.depth,
        discovered_from: discovery.discovered_from.clone(),
        resolution: Resolution::NotArchived,
        timemap: TimeMapRecord::empty(resource.clone()),
    };

    let mut tm = match fetch_timemap_with_retry(fetcher.client, &resource) {
        Ok(tm) => tm,
        Err(ArchiveError::TimemapNotFound { .. }) => return entry,
        Err(e) => {
            log::warn!("treating {resource} as not archived after fetch failure: {e}");
            return entry;
        }
    };
    if tm.is_empty() {
        entry.timemap = tm;
        return entry;
    }

    // Selection: fetch the desired memento, skipping live-web escapes. A
    // fetch failure means the desired memento is missing; classification
    // falls back to neighbors, but the entry stays missing-memento.
    let want_body = discovery.recursable && discovery.depth < options.limits.max_depth;
    loop {
        let Some(index) = select_index(tm.mementos(), selection_pivot, |m| {
            !m.has_flag(MementoFlag::LiveWebRedirect) && !m.has_flag(MementoFlag::Unretrievable)
        }) else {
            entry.resolution = Resolution::NotArchived;
            break;
        };
        let uri_m = tm.mementos()[index].uri_m.clone();
        match fetcher.fetch(&uri_m, want_body) {
            FetchOutcome::Ok(record) => {
                let mut record = *record;
                record.flags.extend(tm.mementos()[index].flags.iter().copied());
                tm.replace(index, record.clone());
                entry.selected = Some(record);
                entry.resolution = Resolution::Resolved;
                break;
            }
            FetchOutcome::Redirected { live_web: true, .. } => {
                tm.add_flag(index, MementoFlag::LiveWebRedirect);
            }
            FetchOutcome::Redirected { .. } | FetchOutcome::Failed { .. } => {
                tm.add_flag(index, MementoFlag::Unretrievable);
                entry.resolution = Resolution::MissingMemento;
                break;
            }
        }
    }

    ensure_deciding_evidence(fetcher, &mut tm, t0, options.mode);

    let neighbors = tm.neighbors(t0);
    entry.left_neighbor = neighbors.left.cloned();
    entry.right_neighbor = neighbors.right.cloned();
    entry.timemap = tm;
    entry
}

// Fetch headers (and, in content mode, pair bodies) for the mementos the
// classifier will consult, walking inward-out past unretrievable captures so
// the fallback policy has its evidence in place.
fn ensure_deciding_evidence(
    fetcher: &mut CachingFetcher,
    tm: &mut TimeMapRecord,
    t0: &ArchivalDatetime,
    mode: EvaluationMode,
) {
    let t0 = t0.epoch_seconds();

    let usable = |tm: &TimeMapRecord| -> Vec<usize> {
        (0..tm.len())
            .filter(|&i| !tm.mementos()[i].has_flag(MementoFlag::LiveWebRedirect))
            .collect()
    };

    // Simultaneous captures decide on the timemap datetime alone.
    if usable(tm).iter().any(|&i| tm.mementos()[i].epoch() == t0) {
        return;
    }

    let split = |tm: &TimeMapRecord| -> (Vec<usize>, Vec<usize>) {
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        for i in usable(tm) {
            if tm.mementos()[i].epoch() < t0 {
                lefts.push(i);
            } else if tm.mementos()[i].epoch() > t0 {
                rights.push(i);
            }
        }
        (lefts, rights)
    };

    let (lefts, rights) = split(tm);
    if !lefts.is_empty() && !rights.is_empty() {
        let want_body = mode == EvaluationMode::WithContent;
        // Right memento of the pair (plus datetime-collision siblings).
        let got_right = fetch_datetime_group(fetcher, tm, &rights, GroupPick::First, want_body);
        if got_right {
            if want_body {
                // The left pair member participates only through its body.
                let (lefts, _) = split(tm);
                fetch_datetime_group(fetcher, tm, &lefts, GroupPick::Last, true);
            }
            return;
        }
        // Degraded: walk the left side newest-first, then remaining rights.
        let (lefts, rights) = split(tm);
        if fetch_chain(fetcher, tm, &lefts, GroupPick::Last, false) {
            return;
        }
        fetch_chain(fetcher, tm, &rights, GroupPick::First, false);
    } else if !rights.is_empty() {
        fetch_chain(fetcher, tm, &rights, GroupPick::First, false);
    } else if !lefts.is_empty() {
        fetch_chain(fetcher, tm, &lefts, GroupPick::Last, false);
    }
}

#[derive(Clone, Copy, PartialEq)]
enum GroupPick {
    /// Oldest datetime group (right side walks forward in time).
    First,
    /// Newest datetime group (left side walks backward in time).
    Last,
}

// Fetch every memento sharing the picked group's datetime. True when at
// least one came back usable.
fn fetch_datetime_group(
    fetcher: &mut CachingFetcher,
    tm: &mut TimeMapRecord,
    candidates: &[usize],
    pick: GroupPick,
    want_body: bool,
) -> bool {
    let Some(&anchor) = (match pick {
        GroupPick::First => candidates.first(),
        GroupPick::Last => candidates.last(),
    }) else {
        return false;
    };
    let group_epoch = tm.mementos()[anchor].epoch();
    let members: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| tm.mementos()[i].epoch() == group_epoch)
        .collect();

    let mut any_ok = false;
    for index in members {
        if tm.mementos()[index].has_flag(MementoFlag::Unretrievable) {
            continue;
        }
        // Enriched already (e.g. it was the selected memento)?
        let already = &tm.mementos()[index];
        let has_headers = already.last_modified != crate::datetime::DatetimeField::absent()
            || already.media_type.is_some()
            || already.body.is_some();
        if has_headers && (!want_body || already.body.is_some()) {
            any_ok = true;
            continue;
        }
        let uri_m = already.uri_m.clone();
        match fetcher.fetch(&uri_m, want_body) {
            FetchOutcome::Ok(record) => {
                let mut record = *record;
                record.flags.extend(tm.mementos()[index].flags.iter().copied());
                tm.replace(index, record);
                any_ok = true;
            }
            FetchOutcome::Redirected { live_web: true, .. } => {
                tm.add_flag(index, MementoFlag::LiveWebRedirect);
            }
            FetchOutcome::Redirected { .. } | FetchOutcome::Failed { .. } => {
                tm.add_flag(index, MementoFlag::Unretrievable);
            }
        }
    }
    any_ok
}

// Walk datetime groups inward-out until one yields a retrievable memento.
fn fetch_chain(
    fetcher: &mut CachingFetcher,
    tm: &mut TimeMapRecord,
    candidates: &[usize],
    pick: GroupPick,
    want_body: bool,
) -> bool {
    let mut remaining: Vec<usize> = candidates.to_vec();
    while !remaining.is_empty() {
        if fetch_datetime_group(fetcher, tm, &remaining, pick, want_body) {
            return true;
        }
        let anchor_epoch = match pick {
            GroupPick::First => tm.mementos()[*remaining.first().unwrap()].epoch(),
            GroupPick::Last => tm.mementos()[*remaining.last().unwrap()].epoch(),
        };
        remaining.retain(|&i| tm.mementos()[i].epoch() != anchor_epoch);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dt(epoch: i64) -> ArchivalDatetime {
        ArchivalDatetime::from_epoch_seconds(epoch)
    }

    fn tm(epochs: &[i64]) -> TimeMapRecord {
        let resource = OriginalResourceRef::parse("http://example.com/r").unwrap();
        let mementos = epochs
            .iter()
            .enumerate()
            .map(|(i, &e)| MementoRecord::new(format!("http://a.example/m/{i}"), dt(e)))
            .collect();
        TimeMapRecord::new(resource, mementos)
    }

    #[test]
    fn nearest_breaks_ties_toward_earlier() {
        let t = tm(&[90, 110]);
        let selected = select_memento(&t, &dt(100), &SelectionHeuristic::nearest()).unwrap();
        assert_eq!(selected.epoch(), 90);
    }

    #[test]
    fn nearest_prefers_strictly_closer() {
        let t = tm(&[90, 105]);
        let selected = select_memento(&t, &dt(100), &SelectionHeuristic::nearest()).unwrap();
        assert_eq!(selected.epoch(), 105);
    }

    #[test]
    fn empty_timemap_selects_nothing() {
        let t = tm(&[]);
        assert!(select_memento(&t, &dt(100), &SelectionHeuristic::nearest()).is_none());
    }

    #[test]
    fn unknown_heuristic_is_config_error() {
        assert!(SelectionHeuristic::by_name("nearest").is_ok());
        assert!(matches!(
            SelectionHeuristic::by_name("furthest"),
            Err(RecomposeError::UnknownHeuristic(_))
        ));
    }

    #[test]
    fn zero_limits_rejected() {
        let limits = RecomposeLimits {
            max_depth: 0,
            max_resources: 10,
        };
        assert!(limits.validate().is_err());
    }

    proptest! {
        // Selection optimality: nothing in the timemap is strictly closer to
        // the target than the selected memento.
        #[test]
        fn selection_is_optimal(
            mut epochs in proptest::collection::vec(-500i64..500, 1..16),
            target in -500i64..500,
        ) {
            epochs.sort_unstable();
            let t = tm(&epochs);
            let selected = select_memento(&t, &dt(target), &SelectionHeuristic::nearest()).unwrap();
            let d = (selected.epoch() - target).abs();
            for m in t.mementos() {
                prop_assert!((m.epoch() - target).abs() >= d);
            }
        }
    }
}
