//! Command-line interface: recompose an archived page, classify its
//! embedded resources, and report temporal coherence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use memcoh_core::archive::fixture::{dir_name_for, timemap_from_json, TimemapJson};
use memcoh_core::archive::headers::parse_header_block;
use memcoh_core::archive::link_format::{interpret_timemap, parse_link_format};
use memcoh_core::datetime::epoch_from_civil;
use memcoh_core::{
    build_report, classify, classify_composite, recompose, report_to_json, ArchivalDatetime,
    ArchiveClient, ArchiveSource, CoherenceReport, EvaluationMode, MementoRecord,
    OriginalResourceRef, RecomposeError, RecomposeLimits, RecomposeOptions, Resolution,
    ResolutionEntry, SelectionHeuristic, SimilarityPolicy, StripProfile, TimeMapRecord,
};

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_ROOT_NOT_ARCHIVED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "memcoh",
    version,
    about = "Temporal-coherence analysis of archived composite web pages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompose a composite memento and classify every embedded resource.
    Analyze(AnalyzeArgs),
    /// Classify a single embedded resource's timemap against a root datetime.
    ClassifyOne(ClassifyOneArgs),
    /// Fixture-store maintenance.
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Root original resource (URI-R) to recompose.
    root_uri_r: String,

    /// Target datetime: ISO 8601 (2004-12-09T19:29:26Z) or a 14-digit stamp
    /// (20041209192926).
    #[arg(long)]
    datetime: String,

    /// Archive to read from: live:<timemap-template> ({uri} is replaced by
    /// the URI-R) or fixture:<path>.
    #[arg(long, default_value = "live:http://web.archive.org/web/timemap/link/{uri}")]
    source: String,

    /// Classification evidence.
    #[arg(long, value_enum, default_value_t = ModeArg::Headers)]
    mode: ModeArg,

    /// Memento selection heuristic.
    #[arg(long, default_value = "nearest")]
    heuristic: String,

    /// Maximum recursion depth into frames and stylesheets.
    #[arg(long, default_value_t = 3)]
    max_depth: u32,

    /// Maximum number of embedded resources to resolve.
    #[arg(long, default_value_t = 512)]
    max_resources: usize,

    /// Select embedded mementos at the target datetime instead of at the
    /// root's capture datetime.
    #[arg(long)]
    select_at_target: bool,

    /// Replay-URL rewriting scheme of the archive.
    #[arg(long, default_value = "wayback")]
    rewrite_profile: String,

    /// Delay between requests to one host, milliseconds (live sources).
    #[arg(long, default_value_t = 1000)]
    politeness_ms: u64,

    /// Maximum concurrent requests per host (live sources).
    #[arg(long, default_value_t = 2)]
    max_parallel: usize,

    /// Request timeout, milliseconds (live sources).
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,

    #[command(flatten)]
    similarity: SimilarityArgs,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimilarityArgs {
    /// Tokens per shingle for text similarity.
    #[arg(long, default_value_t = 4)]
    shingle_size: usize,

    /// Jaccard threshold for "similar".
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,

    /// Strip profile for injected archive chrome: "wayback", "none", or a
    /// path to a profile file.
    #[arg(long, default_value = "wayback")]
    strip_profile: String,
}

impl SimilarityArgs {
    fn build(&self) -> Result<SimilarityPolicy> {
        let profile = match self.strip_profile.as_str() {
            "wayback" => StripProfile::wayback(),
            "none" => StripProfile::none(),
            path => StripProfile::load(path, Path::new(path))
                .with_context(|| format!("loading strip profile {path}"))?,
        };
        let policy = SimilarityPolicy {
            strip_profiles: vec![profile],
            shingle_size: self.shingle_size,
            threshold: self.threshold,
            ..SimilarityPolicy::default()
        };
        policy.validate().map_err(|e| anyhow!(e))?;
        Ok(policy)
    }
}

#[derive(Args)]
struct ClassifyOneArgs {
    /// Timemap file: fixture-style JSON or RFC 7089 link-format.
    #[arg(long)]
    timemap: PathBuf,

    /// The root memento's capture datetime (ISO 8601 or 14-digit stamp).
    #[arg(long)]
    root_datetime: String,

    /// Classification evidence (content mode requires bodies, which a bare
    /// timemap cannot carry; headers is the useful setting here).
    #[arg(long, value_enum, default_value_t = ModeArg::Headers)]
    mode: ModeArg,

    #[command(flatten)]
    similarity: SimilarityArgs,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Check that a fixture store is well-formed.
    Validate { path: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Headers,
    Content,
}

impl From<ModeArg> for EvaluationMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Headers => EvaluationMode::HeadersOnly,
            ModeArg::Content => EvaluationMode::WithContent,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(&args),
        Command::ClassifyOne(args) => run_classify_one(&args),
        Command::Fixtures {
            command: FixturesCommand::Validate { path },
        } => run_fixtures_validate(&path),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

/// Accepts `YYYYMMDDHHMMSS` stamps and `YYYY-MM-DD[T ]HH:MM:SS[Z]`.
fn parse_cli_datetime(input: &str) -> Result<ArchivalDatetime> {
    let input = input.trim();
    let digits_only = input.len() == 14 && input.bytes().all(|b| b.is_ascii_digit());
    let (y, mo, d, h, mi, s) = if digits_only {
        (
            input[0..4].parse()?,
            input[4..6].parse()?,
            input[6..8].parse()?,
            input[8..10].parse()?,
            input[10..12].parse()?,
            input[12..14].parse()?,
        )
    } else {
        let normalized = input
            .trim_end_matches('Z')
            .replace('T', " ");
        let (date, time) = normalized
            .split_once(' ')
            .ok_or_else(|| anyhow!("expected ISO 8601 or 14-digit stamp, got {input:?}"))?;
        let date_parts: Vec<&str> = date.split('-').collect();
        let time_parts: Vec<&str> = time.split(':').collect();
        if date_parts.len() != 3 || time_parts.len() != 3 {
            bail!("expected ISO 8601 or 14-digit stamp, got {input:?}");
        }
        (
            date_parts[0].parse()?,
            date_parts[1].parse()?,
            date_parts[2].parse()?,
            time_parts[0].parse()?,
            time_parts[1].parse()?,
            time_parts[2].parse()?,
        )
    };
    let epoch = epoch_from_civil(y, mo, d, h, mi, s)
        .ok_or_else(|| anyhow!("{input:?} is not a valid calendar datetime"))?;
    Ok(ArchivalDatetime::from_epoch_seconds(epoch))
}

fn run_analyze(args: &AnalyzeArgs) -> Result<u8> {
    let root = OriginalResourceRef::parse(&args.root_uri_r)
        .map_err(|e| anyhow!("root URI-R: {e}"))?;
    let target = parse_cli_datetime(&args.datetime).context("--datetime")?;

    let mut source = ArchiveSource::parse_spec(&args.source).map_err(|e| anyhow!(e))?;
    source.politeness_delay_ms = args.politeness_ms;
    source.max_parallel_fetches = args.max_parallel.max(1);
    source.request_timeout_ms = args.timeout_ms;
    source.rewrite_profile =
        memcoh_core::archive::rewrite::RewriteProfile::parse(&args.rewrite_profile)
            .map_err(|e| anyhow!(e))?;
    let client = ArchiveClient::new(&source).map_err(|e| anyhow!(e))?;

    let options = RecomposeOptions {
        heuristic: SelectionHeuristic::by_name(&args.heuristic).map_err(|e| anyhow!(e))?,
        limits: RecomposeLimits {
            max_depth: args.max_depth,
            max_resources: args.max_resources,
        },
        mode: args.mode.into(),
        select_at_target: args.select_at_target,
    };
    let policy = args.similarity.build()?;

    let composite = match recompose(&client, &root, &target, &options) {
        Ok(composite) => composite,
        Err(RecomposeError::RootNotArchived { uri }) => {
            eprintln!("root resource is not archived: {uri}");
            return Ok(EXIT_ROOT_NOT_ARCHIVED);
        }
        Err(e) => return Err(anyhow!(e)),
    };
    let verdicts = classify_composite(&composite, options.mode, &policy);
    let report = build_report(
        &composite,
        &verdicts,
        options.mode,
        &options.limits,
        env!("CARGO_PKG_VERSION"),
    );

    let rendered = match args.format {
        FormatArg::Json => report_to_json(&report),
        FormatArg::Table => render_table(&report),
    };
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            file.write_all(rendered.as_bytes())?;
        }
        None => print!("{rendered}"),
    }
    Ok(EXIT_OK)
}

fn render_table(report: &CoherenceReport) -> String {
    let mut rows: Vec<[String; 5]> = Vec::new();
    rows.push([
        "root".to_string(),
        "-".to_string(),
        "-".to_string(),
        report.root.memento_datetime.clone(),
        report.root.uri_r.clone(),
    ]);
    for entry in &report.entries {
        let mut pattern = entry.pattern.clone();
        if entry.degraded {
            pattern.push('*');
        }
        if entry.collision_resolved {
            pattern.push('!');
        }
        rows.push([
            entry.delta_human.clone().unwrap_or_else(|| "-".to_string()),
            pattern,
            entry.state.clone(),
            entry.memento_datetime.clone().unwrap_or_else(|| entry.resolution.clone()),
            entry.uri_r.clone(),
        ]);
    }

    let header = ["DELTA", "PATTERN", "STATE", "MEMENTO-DATETIME", "URI-R"];
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }

    let mut out = String::new();
    let fmt_row = |cells: [&str; 5], widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i == cells.len() - 1 {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{:<width$}  ", cell, width = widths[i]));
            }
        }
        line.push('\n');
        line
    };
    out.push_str(&fmt_row(header, &widths));
    for row in &rows {
        out.push_str(&fmt_row(
            [&row[0], &row[1], &row[2], &row[3], &row[4]],
            &widths,
        ));
    }

    let spread = &report.spread;
    out.push('\n');
    out.push_str(&format!(
        "temporal spread: {} ({} seconds)\n",
        spread.spread_human, spread.spread_seconds
    ));
    if let (Some(mean), Some(stddev)) = (spread.mean_delta_seconds, spread.stddev_delta_seconds) {
        out.push_str(&format!(
            "mean delta: {} | stddev: {}\n",
            memcoh_core::render_delta(mean.round() as i64),
            memcoh_core::render_spread(stddev.round() as i64),
        ));
    }
    out.push_str(&format!(
        "resolved: {} | not archived: {} | missing mementos: {} | truncated: {}\n",
        spread.counts.resolved,
        spread.counts.not_archived,
        spread.counts.missing_memento,
        report.truncated.len(),
    ));
    let states: Vec<String> = spread
        .per_state_counts
        .iter()
        .map(|(state, count)| format!("{state}={count}"))
        .collect();
    out.push_str(&format!("states: {}\n", states.join(" ")));
    out
}

fn run_classify_one(args: &ClassifyOneArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.timemap)
        .with_context(|| format!("reading {}", args.timemap.display()))?;
    let root_datetime = parse_cli_datetime(&args.root_datetime).context("--root-datetime")?;
    let policy = args.similarity.build()?;

    let tm = parse_timemap_file(&text)?;
    let root = MementoRecord::new("cli:root", root_datetime);

    let heuristic = SelectionHeuristic::nearest();
    let selected = memcoh_core::select_memento(&tm, &root.memento_datetime, &heuristic).cloned();
    let neighbors = tm.neighbors(&root.memento_datetime);
    let entry = ResolutionEntry {
        resource: tm.resource().clone(),
        left_neighbor: neighbors.left.cloned(),
        right_neighbor: neighbors.right.cloned(),
        resolution: if tm.is_empty() {
            Resolution::NotArchived
        } else {
            Resolution::Resolved
        },
        selected,
        discovery_depth: 1,
        discovered_from: "cli:argument".to_string(),
        timemap: tm.clone(),
    };
    let verdict = classify(&root, &entry, &tm, args.mode.into(), &policy);

    let json = serde_json::json!({
        "uri_r": entry.resource.as_str(),
        "pattern": verdict.pattern.as_str(),
        "state": verdict.state.as_str(),
        "state_description": verdict.state.description(),
        "degraded": verdict.degraded,
        "collision_resolved": verdict.collision_resolved,
    });
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(EXIT_OK)
}

// Fixture-style JSON or link-format, sniffed from the first significant byte.
fn parse_timemap_file(text: &str) -> Result<TimeMapRecord> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: TimemapJson = serde_json::from_str(text).context("parsing timemap JSON")?;
        return timemap_from_json(&doc).map_err(|e| anyhow!(e));
    }
    let links = parse_link_format(text).map_err(|e| anyhow!(e))?;
    let doc = interpret_timemap(&links);
    let uri_r = doc
        .original
        .ok_or_else(|| anyhow!("link-format timemap lacks a rel=\"original\" entry"))?;
    let resource = OriginalResourceRef::parse(&uri_r).map_err(|e| anyhow!(e))?;
    Ok(TimeMapRecord::new(resource, doc.mementos))
}

fn run_fixtures_validate(path: &Path) -> Result<u8> {
    if !path.is_dir() {
        bail!("{} is not a directory", path.display());
    }
    let mut problems = 0usize;
    let mut resources = 0usize;
    let mut complain = |msg: String| {
        println!("problem: {msg}");
        problems += 1;
    };

    let mut dirs: Vec<PathBuf> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    for dir in dirs {
        resources += 1;
        let dir_name = dir.file_name().unwrap_or_default().to_string_lossy().to_string();
        let timemap_path = dir.join("timemap.json");
        let doc: TimemapJson = match std::fs::read_to_string(&timemap_path)
            .map_err(anyhow::Error::from)
            .and_then(|text| serde_json::from_str(&text).map_err(anyhow::Error::from))
        {
            Ok(doc) => doc,
            Err(e) => {
                complain(format!("{}: {e}", timemap_path.display()));
                continue;
            }
        };
        if dir_name_for(&doc.uri_r) != dir_name {
            complain(format!(
                "{}: directory name does not encode uri_r {}",
                dir.display(),
                doc.uri_r
            ));
        }
        match timemap_from_json(&doc) {
            Ok(tm) => {
                if tm.len() != doc.mementos.len() {
                    complain(format!(
                        "{}: {} of {} mementos have undecodable datetimes",
                        timemap_path.display(),
                        doc.mementos.len() - tm.len(),
                        doc.mementos.len()
                    ));
                }
            }
            Err(e) => complain(format!("{}: {e}", timemap_path.display())),
        }
        // Header blocks must parse; bodies are opaque.
        let mut headers_files: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "headers"))
            .collect();
        headers_files.sort();
        for headers_path in headers_files {
            match std::fs::read_to_string(&headers_path) {
                Ok(text) => {
                    if let Err(e) = parse_header_block(&text) {
                        complain(format!("{}: {e}", headers_path.display()));
                    }
                }
                Err(e) => complain(format!("{}: {e}", headers_path.display())),
            }
        }
    }

    println!(
        "checked {resources} resource directories: {} problem(s)",
        problems
    );
    Ok(if problems == 0 { EXIT_OK } else { EXIT_FAILURE })
}
