//! Temporal-spread statistics and the serializable coherence report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{CoherenceState, CoherenceVerdict, EvaluationMode};
use crate::model::{CompositeMemento, Resolution};
use crate::recompose::RecomposeLimits;

const SECONDS_PER_MINUTE: f64 = 60.0;
const SECONDS_PER_HOUR: f64 = 3_600.0;
const SECONDS_PER_DAY: f64 = 86_400.0;
/// One mean month: 30.44 days.
const SECONDS_PER_MONTH: f64 = 30.44 * SECONDS_PER_DAY;
/// One mean year: 365.25 days.
const SECONDS_PER_YEAR: f64 = 365.25 * SECONDS_PER_DAY;

/// Render a signed delta the way the analysis tables do: integer seconds /
/// minutes / hours / days (rounded up), one-decimal months and years.
pub fn render_delta(delta_seconds: i64) -> String {
    if delta_seconds == 0 {
        return "0 seconds".to_string();
    }
    let sign = if delta_seconds < 0 { "-" } else { "+" };
    let mag = delta_seconds.unsigned_abs() as f64;
    if mag < 120.0 {
        integer_unit(sign, mag, 1.0, "second")
    } else if mag < 120.0 * SECONDS_PER_MINUTE {
        integer_unit(sign, mag, SECONDS_PER_MINUTE, "minute")
    } else if mag < 24.0 * SECONDS_PER_HOUR {
        integer_unit(sign, mag, SECONDS_PER_HOUR, "hour")
    } else if mag < SECONDS_PER_MONTH {
        integer_unit(sign, mag, SECONDS_PER_DAY, "day")
    } else if mag < SECONDS_PER_YEAR {
        format!("{sign}{:.1} months", mag / SECONDS_PER_MONTH)
    } else {
        format!("{sign}{:.1} years", mag / SECONDS_PER_YEAR)
    }
}

fn integer_unit(sign: &str, mag: f64, unit: f64, name: &str) -> String {
    let n = (mag / unit).ceil() as i64;
    let plural = if n == 1 { "" } else { "s" };
    format!("{sign}{n} {name}{plural}")
}

/// Render an always-positive spread, same buckets as deltas.
pub fn render_spread(spread_seconds: i64) -> String {
    render_delta(spread_seconds.abs())
        .trim_start_matches('+')
        .to_string()
}

/// Resolution tallies over a composite's entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionCounts {
    pub resolved: usize,
    pub not_archived: usize,
    pub missing_memento: usize,
}

/// Temporal-spread statistics for a classified composite memento.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    /// Latest minus earliest capture datetime across the root and all
    /// resolved entries.
    pub spread_seconds: i64,
    pub spread_human: String,
    /// Mean of the resolved entries' deltas from the root capture; absent
    /// when nothing resolved.
    pub mean_delta_seconds: Option<f64>,
    /// Population standard deviation of those deltas.
    pub stddev_delta_seconds: Option<f64>,
    pub min_delta_seconds: Option<i64>,
    pub max_delta_seconds: Option<i64>,
    pub counts: ResolutionCounts,
    /// Verdicts per coherence state code; all five states always present.
    pub per_state_counts: BTreeMap<String, usize>,
}

/// Compute spread statistics over the resolved entries of a composite.
pub fn compute_spread(cm: &CompositeMemento, verdicts: &[CoherenceVerdict]) -> SpreadReport {
    let t0 = cm.root.memento_datetime.epoch_seconds();

    let mut counts = ResolutionCounts::default();
    let mut deltas: Vec<i64> = Vec::new();
    for entry in &cm.entries {
        match entry.resolution {
            Resolution::Resolved => {
                counts.resolved += 1;
                if let Some(selected) = &entry.selected {
                    deltas.push(selected.epoch() - t0);
                }
            }
            Resolution::NotArchived => counts.not_archived += 1,
            Resolution::MissingMemento => counts.missing_memento += 1,
        }
    }

    let mut per_state_counts: BTreeMap<String, usize> = CoherenceState::ALL
        .iter()
        .map(|s| (s.as_str().to_string(), 0))
        .collect();
    for verdict in verdicts {
        *per_state_counts
            .entry(verdict.state.as_str().to_string())
            .or_default() += 1;
    }

    let min_delta = deltas.iter().copied().min();
    let max_delta = deltas.iter().copied().max();
    // The root participates in the spread with delta zero.
    let spread_seconds = max_delta.unwrap_or(0).max(0) - min_delta.unwrap_or(0).min(0);

    let (mean, stddev) = if deltas.is_empty() {
        (None, None)
    } else {
        let n = deltas.len() as f64;
        let mean = deltas.iter().map(|&d| d as f64).sum::<f64>() / n;
        let variance = deltas
            .iter()
            .map(|&d| (d as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        (Some(mean), Some(variance.sqrt()))
    };

    SpreadReport {
        spread_seconds,
        spread_human: render_spread(spread_seconds),
        mean_delta_seconds: mean,
        stddev_delta_seconds: stddev,
        min_delta_seconds: min_delta,
        max_delta_seconds: max_delta,
        counts,
        per_state_counts,
    }
}

/// Root summary block of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSummary {
    pub uri_r: String,
    pub uri_m: String,
    pub memento_datetime: String,
}

/// Per-resource record of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub uri_r: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uri_m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memento_datetime: Option<String>,
    /// State of the Last-Modified evidence the verdict used: `defined`,
    /// `absent`, `unparseable`, `clearly-incorrect`, or `unused`.
    pub last_modified: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_seconds: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_human: Option<String>,
    pub pattern: String,
    pub state: String,
    pub resolution: String,
    pub degraded: bool,
    pub collision_resolved: bool,
    pub flags: Vec<String>,
    pub discovery_depth: u32,
    pub discovered_from: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Run parameters echoed into the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub heuristic: String,
    pub mode: String,
    pub max_depth: u32,
    pub max_resources: usize,
    pub tool_version: String,
}

/// The complete serializable analysis report. Serialization is
/// deterministic: equal reports produce byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub root: RootSummary,
    pub target_datetime: String,
    pub run: RunMetadata,
    pub entries: Vec<EntryReport>,
    pub truncated: Vec<String>,
    pub spread: SpreadReport,
}

/// Assemble the report for a classified composite.
///
/// `verdicts` must be the output of classifying `cm`, in entry order.
pub fn build_report(
    cm: &CompositeMemento,
    verdicts: &[CoherenceVerdict],
    mode: EvaluationMode,
    limits: &RecomposeLimits,
    tool_version: &str,
) -> CoherenceReport {
    let t0 = cm.root.memento_datetime.epoch_seconds();
    let mut entries = Vec::with_capacity(cm.entries.len());
    for (entry, verdict) in cm.entries.iter().zip(verdicts) {
        let delta = entry
            .selected
            .as_ref()
            .map(|selected| selected.epoch() - t0);
        let lm_state = match &verdict.evidence.lm_used {
            None => "unused".to_string(),
            Some(field) => match field.undefined_reason() {
                None => "defined".to_string(),
                Some(reason) => reason.as_str().to_string(),
            },
        };
        let mut flags: Vec<String> = entry
            .selected
            .as_ref()
            .map(|s| s.flags.iter().map(|f| f.as_str().to_string()).collect())
            .unwrap_or_default();
        if verdict.evidence.dynamic_suspect && !flags.iter().any(|f| f == "dynamic-suspect") {
            flags.push("dynamic-suspect".to_string());
        }
        entries.push(EntryReport {
            uri_r: entry.resource.as_str().to_string(),
            uri_m: entry.selected.as_ref().map(|s| s.uri_m.clone()),
            memento_datetime: entry
                .selected
                .as_ref()
                .map(|s| s.memento_datetime.to_rfc1123()),
            last_modified: lm_state,
            delta_seconds: delta,
            delta_human: delta.map(render_delta),
            pattern: verdict.pattern.as_str().to_string(),
            state: verdict.state.as_str().to_string(),
            resolution: entry.resolution.as_str().to_string(),
            degraded: verdict.degraded,
            collision_resolved: verdict.collision_resolved,
            flags,
            discovery_depth: entry.discovery_depth,
            discovered_from: entry.discovered_from.clone(),
            note: verdict.note.clone(),
        });
    }

    CoherenceReport {
        root: RootSummary {
            uri_r: cm.root_resource.as_str().to_string(),
            uri_m: cm.root.uri_m.clone(),
            memento_datetime: cm.root.memento_datetime.to_rfc1123(),
        },
        target_datetime: cm.target_datetime.to_rfc1123(),
        run: RunMetadata {
            heuristic: cm.heuristic_name.clone(),
            mode: match mode {
                EvaluationMode::HeadersOnly => "headers".to_string(),
                EvaluationMode::WithContent => "content".to_string(),
            },
            max_depth: limits.max_depth,
            max_resources: limits.max_resources,
            tool_version: tool_version.to_string(),
        },
        entries,
        truncated: cm.truncated.iter().map(|r| r.as_str().to_string()).collect(),
        spread: compute_spread(cm, verdicts),
    }
}

/// Canonical JSON rendering: pretty-printed with a trailing newline.
pub fn report_to_json(report: &CoherenceReport) -> String {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    json
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_composite, EvaluationMode};
    use crate::datetime::ArchivalDatetime;
    use crate::model::{
        MementoRecord, OriginalResourceRef, ResolutionEntry, TimeMapRecord,
    };
    use crate::similarity::SimilarityPolicy;

    #[test]
    fn delta_rendering_buckets() {
        assert_eq!(render_delta(0), "0 seconds");
        assert_eq!(render_delta(1), "+1 second");
        assert_eq!(render_delta(-90), "-90 seconds");
        assert_eq!(render_delta(121), "+3 minutes");
        assert_eq!(render_delta(-7_140), "-119 minutes");
        assert_eq!(render_delta(7_200), "+2 hours");
        assert_eq!(render_delta(-86_400), "-1 day");
        assert_eq!(render_delta(90_000), "+2 days");
    }

    #[test]
    fn table_style_renderings() {
        // Frozen from the wunderground composite.
        assert_eq!(render_delta(-4_722_513), "-1.8 months");
        assert_eq!(render_delta(-1_518_203), "-18 days");
        assert_eq!(render_delta(-1_518_174), "-18 days");
        assert_eq!(render_delta(-131_298), "-2 days");
        assert_eq!(render_delta(-53_592), "-15 hours");
        assert_eq!(render_delta(33_569), "+10 hours");
        assert_eq!(render_delta(242_675), "+3 days");
        assert_eq!(render_delta(4_174_144), "+1.6 months");
        assert_eq!(render_delta(40_723_174), "+1.3 years");
        assert_eq!(render_delta(207_927_514), "+6.6 years");
        assert_eq!(render_delta(255_436_788), "+8.1 years");
        assert_eq!(render_spread(260_159_301), "8.2 years");
    }

    fn composite(entry_epochs: &[(i64, Resolution)]) -> CompositeMemento {
        let root_resource = OriginalResourceRef::parse("http://root.example/").unwrap();
        let root = MementoRecord::new(
            "http://a.example/web/20041209192926/http://root.example/",
            ArchivalDatetime::from_epoch_seconds(1000),
        );
        let entries = entry_epochs
            .iter()
            .enumerate()
            .map(|(i, (epoch, resolution))| {
                let resource =
                    OriginalResourceRef::parse(&format!("http://e{i}.example/r")).unwrap();
                let selected = (*resolution == Resolution::Resolved).then(|| {
                    MementoRecord::new(
                        format!("http://a.example/web/{i}/http://e{i}.example/r"),
                        ArchivalDatetime::from_epoch_seconds(*epoch),
                    )
                });
                let timemap = TimeMapRecord::new(
                    resource.clone(),
                    selected.clone().into_iter().collect(),
                );
                ResolutionEntry {
                    resource,
                    selected,
                    left_neighbor: None,
                    right_neighbor: None,
                    discovery_depth: 1,
                    discovered_from: root.uri_m.clone(),
                    resolution: *resolution,
                    timemap,
                }
            })
            .collect();
        CompositeMemento {
            root_resource,
            root,
            target_datetime: ArchivalDatetime::from_epoch_seconds(1000),
            entries,
            truncated: vec![],
            heuristic_name: "nearest".to_string(),
        }
    }

    #[test]
    fn spread_over_resolved_entries_only() {
        let cm = composite(&[
            (900, Resolution::Resolved),
            (1300, Resolution::Resolved),
            (0, Resolution::NotArchived),
            (0, Resolution::MissingMemento),
        ]);
        let verdicts = classify_composite(&cm, EvaluationMode::HeadersOnly, &SimilarityPolicy::default());
        let spread = compute_spread(&cm, &verdicts);
        assert_eq!(spread.spread_seconds, 400);
        assert_eq!(spread.min_delta_seconds, Some(-100));
        assert_eq!(spread.max_delta_seconds, Some(300));
        assert_eq!(spread.mean_delta_seconds, Some(100.0));
        assert_eq!(spread.stddev_delta_seconds, Some(200.0));
        assert_eq!(
            spread.counts,
            ResolutionCounts {
                resolved: 2,
                not_archived: 1,
                missing_memento: 1
            }
        );
    }

    #[test]
    fn single_entry_at_root_datetime_has_zero_spread() {
        let cm = composite(&[(1000, Resolution::Resolved)]);
        let verdicts = classify_composite(&cm, EvaluationMode::HeadersOnly, &SimilarityPolicy::default());
        let spread = compute_spread(&cm, &verdicts);
        assert_eq!(spread.spread_seconds, 0);
        assert_eq!(spread.mean_delta_seconds, Some(0.0));
        assert_eq!(spread.stddev_delta_seconds, Some(0.0));
    }

    #[test]
    fn all_not_archived_has_zero_spread_and_no_mean() {
        let cm = composite(&[(0, Resolution::NotArchived), (0, Resolution::NotArchived)]);
        let verdicts = classify_composite(&cm, EvaluationMode::HeadersOnly, &SimilarityPolicy::default());
        let spread = compute_spread(&cm, &verdicts);
        assert_eq!(spread.spread_seconds, 0);
        assert_eq!(spread.mean_delta_seconds, None);
        assert_eq!(spread.counts.not_archived, 2);
        assert_eq!(spread.per_state_counts["CU"], 2);
    }

    #[test]
    fn report_json_round_trips() {
        let cm = composite(&[
            (900, Resolution::Resolved),
            (0, Resolution::NotArchived),
        ]);
        let verdicts = classify_composite(&cm, EvaluationMode::HeadersOnly, &SimilarityPolicy::default());
        let report = build_report(
            &cm,
            &verdicts,
            EvaluationMode::HeadersOnly,
            &RecomposeLimits::default(),
            "0.1.0-test",
        );
        let json = report_to_json(&report);
        let parsed: CoherenceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(report_to_json(&parsed), json);
    }
}
