//! Leaderboard record ingestion.
//!
//! Records arrive either as JSON lines or as a CSV table with a header row. Each
//! record carries `combo_id, date, metric_name, value, entry_id`. Well-formed
//! records are grouped into one [`MetricSeries`] per task-dataset combination;
//! everything else lands in the rejection report with its line number.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::Deserialize;
use thiserror::Error;

/// Threshold used for the "well-populated combination" count.
pub const POPULATED_ENTRIES: usize = 10;

/// Direction in which a metric improves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    /// Higher is better.
    AccuracyLike,
    /// Lower is better.
    LossLike,
}

impl MetricKind {
    pub fn parse_token(token: &str) -> Option<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "accuracy" | "accuracy-like" | "acc" | "higher" => Some(MetricKind::AccuracyLike),
            "loss" | "loss-like" | "lower" => Some(MetricKind::LossLike),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            MetricKind::AccuracyLike => "accuracy",
            MetricKind::LossLike => "loss",
        }
    }

    /// True when `candidate` beats `incumbent` in this orientation.
    pub fn is_better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            MetricKind::AccuracyLike => candidate > incumbent,
            MetricKind::LossLike => candidate < incumbent,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unreadable record stream: {0}")]
    Io(String),
    #[error("orientation table line {line}: {reason}")]
    Orientation { line: u64, reason: String },
    #[error("csv header is missing column `{0}`")]
    MissingColumn(&'static str),
}

/// Why a line did not make it into the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Malformed(String),
    BadDate(String),
    BadValue(String),
    UnmappedMetric(String),
    KindConflict { combo_id: String, metric_name: String },
    DuplicateEntryId(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(msg) => write!(f, "malformed record: {msg}"),
            RejectReason::BadDate(d) => write!(f, "invalid date `{d}`"),
            RejectReason::BadValue(v) => write!(f, "non-finite or unparsable value `{v}`"),
            RejectReason::UnmappedMetric(m) => write!(f, "unmapped metric `{m}`"),
            RejectReason::KindConflict { combo_id, metric_name } => write!(
                f,
                "metric `{metric_name}` disagrees with orientation already set for `{combo_id}`"
            ),
            RejectReason::DuplicateEntryId(id) => write!(f, "duplicate entry_id `{id}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line_no: u64,
    pub reason: RejectReason,
}

/// Metric-name to orientation lookup, loaded from a two-column CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrientationTable {
    kinds: BTreeMap<String, MetricKind>,
}

impl OrientationTable {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, MetricKind)>,
        S: AsRef<str>,
    {
        Self {
            kinds: entries
                .into_iter()
                .map(|(k, v)| (normalize_name(k.as_ref()), v))
                .collect(),
        }
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut kinds = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| IngestError::Io(e.to_string()))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() < 2 {
                return Err(IngestError::Orientation {
                    line,
                    reason: "expected `metric_name, kind`".into(),
                });
            }
            let kind = MetricKind::parse_token(&rec[1]).ok_or_else(|| IngestError::Orientation {
                line,
                reason: format!("unknown kind `{}`", &rec[1]),
            })?;
            kinds.insert(normalize_name(&rec[0]), kind);
        }
        Ok(Self { kinds })
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }
}

fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

/// Looks up a metric's orientation. Names are matched case-insensitively.
pub fn classify_metric(metric_name: &str, table: &OrientationTable) -> Result<MetricKind, RejectReason> {
    table
        .kinds
        .get(&normalize_name(metric_name))
        .copied()
        .ok_or_else(|| RejectReason::UnmappedMetric(metric_name.trim().to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricObservation {
    pub combo_id: String,
    pub date: NaiveDate,
    pub value: f64,
    pub metric_kind: MetricKind,
    pub metric_name: String,
    pub entry_id: String,
}

/// Dated observations for one combination, sorted by date. Same-day
/// observations keep their input order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub combo_id: String,
    pub metric_kind: MetricKind,
    pub observations: Vec<MetricObservation>,
}

impl MetricSeries {
    pub fn first_date(&self) -> Option<NaiveDate> {
        self.observations.first().map(|o| o.date)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusCounts {
    /// Distinct combo ids seen on any structurally valid line, accepted or not.
    pub total_combos: usize,
    pub combos_with_entries: usize,
    pub combos_with_10_plus: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkCorpus {
    pub series: BTreeMap<String, MetricSeries>,
    pub counts: CorpusCounts,
    pub rejections: Vec<Rejection>,
}

impl BenchmarkCorpus {
    /// Builds a corpus directly from observations, e.g. for synthetic data.
    /// Observations are grouped and stably sorted by date.
    pub fn from_observations(observations: impl IntoIterator<Item = MetricObservation>) -> Self {
        let mut series: BTreeMap<String, MetricSeries> = BTreeMap::new();
        for obs in observations {
            series
                .entry(obs.combo_id.clone())
                .or_insert_with(|| MetricSeries {
                    combo_id: obs.combo_id.clone(),
                    metric_kind: obs.metric_kind,
                    observations: Vec::new(),
                })
                .observations
                .push(obs);
        }
        for s in series.values_mut() {
            s.observations.sort_by_key(|o| o.date);
        }
        let total = series.len();
        let mut corpus = BenchmarkCorpus {
            series,
            counts: CorpusCounts::default(),
            rejections: Vec::new(),
        };
        corpus.counts = recount(&corpus.series, total);
        corpus
    }

    pub fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        let first = self
            .series
            .values()
            .filter_map(|s| s.observations.first())
            .map(|o| o.date)
            .min()?;
        let last = self
            .series
            .values()
            .filter_map(|s| s.observations.last())
            .map(|o| o.date)
            .max()?;
        Some((first, last))
    }

    pub fn observation_count(&self) -> usize {
        self.series.values().map(|s| s.observations.len()).sum()
    }
}

fn recount(series: &BTreeMap<String, MetricSeries>, total_combos: usize) -> CorpusCounts {
    CorpusCounts {
        total_combos,
        combos_with_entries: series.values().filter(|s| !s.observations.is_empty()).count(),
        combos_with_10_plus: series
            .values()
            .filter(|s| s.observations.len() >= POPULATED_ENTRIES)
            .count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Drop records whose `entry_id` was already accepted.
    pub drop_duplicate_entry_ids: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            drop_duplicate_entry_ids: true,
        }
    }
}

#[derive(Debug, Deserialize)]
struct JsonRecord {
    combo_id: String,
    date: String,
    metric_name: String,
    value: serde_json::Value,
    entry_id: serde_json::Value,
}

struct RawRecord {
    line_no: u64,
    combo_id: String,
    date: String,
    metric_name: String,
    value: String,
    entry_id: String,
}

/// Parses a record stream into a corpus. The format (JSON lines or CSV with
/// header) is detected from the first non-blank line.
pub fn parse_records<R: Read>(
    mut reader: R,
    table: &OrientationTable,
    opts: IngestOptions,
) -> Result<BenchmarkCorpus, IngestError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| IngestError::Io(e.to_string()))?;
    let mut rejections = Vec::new();
    let raw = if text.trim_start().starts_with('{') {
        read_json_lines(&text, &mut rejections)
    } else {
        read_csv_rows(&text, &mut rejections)?
    };
    Ok(assemble(raw, table, opts, rejections))
}

fn read_json_lines(text: &str, rejections: &mut Vec<Rejection>) -> Vec<RawRecord> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonRecord>(line) {
            Ok(rec) => out.push(RawRecord {
                line_no,
                combo_id: rec.combo_id,
                date: rec.date,
                metric_name: rec.metric_name,
                value: json_scalar(&rec.value),
                entry_id: json_scalar(&rec.entry_id),
            }),
            Err(e) => rejections.push(Rejection {
                line_no,
                reason: RejectReason::Malformed(e.to_string()),
            }),
        }
    }
    out
}

fn json_scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn read_csv_rows(text: &str, rejections: &mut Vec<Rejection>) -> Result<Vec<RawRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| IngestError::Io(e.to_string()))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    let col = |name: &'static str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(IngestError::MissingColumn(name))
    };
    let (c_combo, c_date, c_metric, c_value, c_entry) = (
        col("combo_id")?,
        col("date")?,
        col("metric_name")?,
        col("value")?,
        col("entry_id")?,
    );
    let width = headers.len();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line_no = e.position().map(|p| p.line()).unwrap_or(0);
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    return Err(IngestError::Io(e.to_string()));
                }
                rejections.push(Rejection {
                    line_no,
                    reason: RejectReason::Malformed(e.to_string()),
                });
                continue;
            }
        };
        let line_no = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != width {
            rejections.push(Rejection {
                line_no,
                reason: RejectReason::Malformed(format!("expected {width} fields, found {}", rec.len())),
            });
            continue;
        }
        out.push(RawRecord {
            line_no,
            combo_id: rec[c_combo].to_string(),
            date: rec[c_date].to_string(),
            metric_name: rec[c_metric].to_string(),
            value: rec[c_value].to_string(),
            entry_id: rec[c_entry].to_string(),
        });
    }
    Ok(out)
}

fn assemble(
    raw: Vec<RawRecord>,
    table: &OrientationTable,
    opts: IngestOptions,
    mut rejections: Vec<Rejection>,
) -> BenchmarkCorpus {
    let mut seen_combos = BTreeSet::new();
    let mut seen_entries = HashSet::new();
    let mut series: BTreeMap<String, MetricSeries> = BTreeMap::new();
    let mut reject = |line_no, reason| rejections.push(Rejection { line_no, reason });

    for rec in raw {
        if rec.combo_id.trim().is_empty() {
            reject(rec.line_no, RejectReason::Malformed("empty combo_id".into()));
            continue;
        }
        let combo_id = rec.combo_id.trim().to_string();
        seen_combos.insert(combo_id.clone());
        let date = match NaiveDate::parse_from_str(rec.date.trim(), "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                reject(rec.line_no, RejectReason::BadDate(rec.date));
                continue;
            }
        };
        let value = match rec.value.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                reject(rec.line_no, RejectReason::BadValue(rec.value));
                continue;
            }
        };
        let kind = match classify_metric(&rec.metric_name, table) {
            Ok(k) => k,
            Err(reason) => {
                reject(rec.line_no, reason);
                continue;
            }
        };
        if let Some(existing) = series.get(&combo_id) {
            if existing.metric_kind != kind {
                reject(
                    rec.line_no,
                    RejectReason::KindConflict {
                        combo_id,
                        metric_name: rec.metric_name,
                    },
                );
                continue;
            }
        }
        let entry_id = rec.entry_id.trim().to_string();
        if opts.drop_duplicate_entry_ids && !seen_entries.insert(entry_id.clone()) {
            reject(rec.line_no, RejectReason::DuplicateEntryId(entry_id));
            continue;
        }
        series
            .entry(combo_id.clone())
            .or_insert_with(|| MetricSeries {
                combo_id: combo_id.clone(),
                metric_kind: kind,
                observations: Vec::new(),
            })
            .observations
            .push(MetricObservation {
                combo_id,
                date,
                value,
                metric_kind: kind,
                metric_name: rec.metric_name.trim().to_string(),
                entry_id,
            });
    }

    for s in series.values_mut() {
        s.observations.sort_by_key(|o| o.date);
    }
    rejections.sort_by_key(|r| r.line_no);
    let counts = recount(&series, seen_combos.len());
    BenchmarkCorpus {
        series,
        counts,
        rejections,
    }
}

/// Serializes every accepted observation as CSV in the ingest schema.
pub fn write_records<W: Write>(corpus: &BenchmarkCorpus, writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| IngestError::Io(e.to_string());
    w.write_record(["combo_id", "date", "metric_name", "value", "entry_id"])
        .map_err(io)?;
    for s in corpus.series.values() {
        for o in &s.observations {
            w.write_record([
                o.combo_id.as_str(),
                &o.date.format("%Y-%m-%d").to_string(),
                o.metric_name.as_str(),
                &o.value.to_string(),
                o.entry_id.as_str(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| IngestError::Io(e.to_string()))
}

/// Writes the rejection report as `line_no, reason`.
pub fn write_rejections<W: Write>(rejections: &[Rejection], writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| IngestError::Io(e.to_string());
    w.write_record(["line_no", "reason"]).map_err(io)?;
    for r in rejections {
        w.write_record([r.line_no.to_string(), r.reason.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| IngestError::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryBucket {
    pub label: &'static str,
    pub min_entries: usize,
    pub max_entries: Option<usize>,
    pub combos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub counts: CorpusCounts,
    pub buckets: Vec<EntryBucket>,
    pub date_range: Option<(NaiveDate, NaiveDate)>,
    /// Records repeating an earlier (combo, date, value) triple.
    pub duplicate_triples: usize,
    /// Earliest date on which some combination beat its best from earlier days.
    pub first_improvement: Option<NaiveDate>,
    /// Date on which the number of seeded combinations first reached 50.
    pub fifty_combos_reached: Option<NaiveDate>,
    pub rejected_lines: usize,
}

impl ValidationReport {
    pub fn bucket(&self, label: &str) -> Option<usize> {
        self.buckets.iter().find(|b| b.label == label).map(|b| b.combos)
    }
}

const BUCKETS: [(&str, usize, Option<usize>); 4] = [
    ("1", 1, Some(1)),
    ("2-4", 2, Some(4)),
    ("5-9", 5, Some(9)),
    (">=10", POPULATED_ENTRIES, None),
];

pub fn validate_corpus(corpus: &BenchmarkCorpus) -> ValidationReport {
    let buckets = BUCKETS
        .iter()
        .map(|&(label, lo, hi)| EntryBucket {
            label,
            min_entries: lo,
            max_entries: hi,
            combos: corpus
                .series
                .values()
                .filter(|s| {
                    let n = s.observations.len();
                    n >= lo && hi.is_none_or(|h| n <= h)
                })
                .count(),
        })
        .collect();

    let mut duplicate_triples = 0;
    for s in corpus.series.values() {
        let mut seen = HashSet::new();
        for o in &s.observations {
            if !seen.insert((o.date, o.value.to_bits())) {
                duplicate_triples += 1;
            }
        }
    }

    let first_improvement = corpus.series.values().filter_map(first_improvement_date).min();

    let mut seeds: Vec<NaiveDate> = corpus.series.values().filter_map(|s| s.first_date()).collect();
    seeds.sort();
    let fifty_combos_reached = seeds.get(49).copied();

    ValidationReport {
        counts: corpus.counts,
        buckets,
        date_range: corpus.date_range(),
        duplicate_triples,
        first_improvement,
        fifty_combos_reached,
        rejected_lines: corpus.rejections.len(),
    }
}

fn first_improvement_date(s: &MetricSeries) -> Option<NaiveDate> {
    let mut best: Option<f64> = None;
    let obs = &s.observations;
    let mut i = 0;
    while i < obs.len() {
        let day = obs[i].date;
        let mut j = i;
        let mut day_best = obs[i].value;
        while j < obs.len() && obs[j].date == day {
            if let Some(b) = best {
                if s.metric_kind.is_better(obs[j].value, b) {
                    return Some(day);
                }
            }
            if s.metric_kind.is_better(obs[j].value, day_best) {
                day_best = obs[j].value;
            }
            j += 1;
        }
        best = Some(match best {
            Some(b) if !s.metric_kind.is_better(day_best, b) => b,
            _ => day_best,
        });
        i = j;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> OrientationTable {
        OrientationTable::new([
            ("Top 5 Accuracy", MetricKind::AccuracyLike),
            ("Accuracy", MetricKind::AccuracyLike),
            ("Perplexity", MetricKind::LossLike),
        ])
    }

    fn parse(text: &str) -> BenchmarkCorpus {
        parse_records(text.as_bytes(), &table(), IngestOptions::default()).unwrap()
    }

    #[test]
    fn empty_stream_gives_empty_corpus() {
        let c = parse("");
        assert_eq!(c.series.len(), 0);
        assert_eq!(c.counts, CorpusCounts::default());
        let c = parse("combo_id,date,metric_name,value,entry_id\n");
        assert_eq!(c.counts.combos_with_entries, 0);
    }

    #[test]
    fn shuffled_dates_are_sorted() {
        let c = parse(
            "combo_id,date,metric_name,value,entry_id\n\
             a,2020-03-01,Accuracy,0.7,e1\n\
             a,2020-01-01,Accuracy,0.5,e2\n\
             a,2020-02-01,Accuracy,0.6,e3\n",
        );
        assert_eq!(c.series.len(), 1);
        let dates: Vec<_> = c.series["a"].observations.iter().map(|o| o.date.to_string()).collect();
        assert_eq!(dates, ["2020-01-01", "2020-02-01", "2020-03-01"]);
    }

    #[test]
    fn json_lines_are_accepted() {
        let c = parse(
            "{\"combo_id\":\"lm-on-ptb\",\"date\":\"2016-05-01\",\"metric_name\":\"Perplexity\",\"value\":78.4,\"entry_id\":17}\n\
             not json\n",
        );
        assert_eq!(c.series["lm-on-ptb"].metric_kind, MetricKind::LossLike);
        assert_eq!(c.series["lm-on-ptb"].observations[0].entry_id, "17");
        assert_eq!(c.rejections.len(), 1);
        assert_eq!(c.rejections[0].line_no, 2);
    }

    #[test]
    fn classify_known_and_unknown() {
        let t = table();
        assert_eq!(classify_metric("Top 5 Accuracy", &t), Ok(MetricKind::AccuracyLike));
        assert_eq!(classify_metric("perplexity", &t), Ok(MetricKind::LossLike));
        assert_eq!(
            classify_metric("FooScore", &t),
            Err(RejectReason::UnmappedMetric("FooScore".into()))
        );
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let c = parse(
            "combo_id,date,metric_name,value,entry_id\n\
             a,2020-13-01,Accuracy,0.7,e1\n\
             a,2020-01-01,FooScore,0.5,e2\n\
             a,2020-01-02,Accuracy,NaN,e3\n\
             a,2020-01-03,Accuracy,0.5\n\
             a,2020-01-04,Accuracy,0.5,e5\n\
             a,2020-01-05,Perplexity,12,e6\n",
        );
        let lines: Vec<_> = c.rejections.iter().map(|r| r.line_no).collect();
        assert_eq!(lines, vec![2, 3, 4, 5, 7]);
        assert!(matches!(c.rejections[0].reason, RejectReason::BadDate(_)));
        assert!(matches!(c.rejections[1].reason, RejectReason::UnmappedMetric(_)));
        assert!(matches!(c.rejections[4].reason, RejectReason::KindConflict { .. }));
        assert_eq!(c.counts.combos_with_entries, 1);
    }

    #[test]
    fn duplicate_entry_ids_dropped_duplicate_values_kept() {
        let text = "combo_id,date,metric_name,value,entry_id\n\
             a,2020-01-01,Accuracy,0.5,e1\n\
             a,2020-01-01,Accuracy,0.5,e2\n\
             a,2020-01-01,Accuracy,0.5,e2\n";
        let c = parse(text);
        assert_eq!(c.series["a"].observations.len(), 2);
        assert_eq!(c.rejections.len(), 1);
        let report = validate_corpus(&c);
        assert_eq!(report.duplicate_triples, 1);

        let keep = parse_records(
            text.as_bytes(),
            &table(),
            IngestOptions {
                drop_duplicate_entry_ids: false,
            },
        )
        .unwrap();
        assert_eq!(keep.series["a"].observations.len(), 3);
    }

    #[test]
    fn bucket_counts() {
        let mut text = String::from("combo_id,date,metric_name,value,entry_id\n");
        for i in 0..12 {
            text.push_str(&format!("big,2020-01-{:02},Accuracy,0.{i},b{i}\n", i + 1));
        }
        text.push_str("small,2020-01-01,Accuracy,0.5,s0\n");
        let report = validate_corpus(&parse(&text));
        assert_eq!(report.bucket(">=10"), Some(1));
        assert_eq!(report.bucket("1"), Some(1));
        assert_eq!(report.counts.combos_with_10_plus, 1);
    }

    #[test]
    fn first_improvement_ignores_same_day_and_first_day() {
        let c = parse(
            "combo_id,date,metric_name,value,entry_id\n\
             a,2003-01-01,Accuracy,0.5,e1\n\
             a,2003-01-01,Accuracy,0.7,e2\n\
             a,2003-06-01,Accuracy,0.6,e3\n\
             a,2004-02-01,Accuracy,0.71,e4\n\
             b,2003-02-01,Perplexity,80,e5\n\
             b,2004-03-01,Perplexity,81,e6\n",
        );
        let r = validate_corpus(&c);
        assert_eq!(r.first_improvement, NaiveDate::from_ymd_opt(2004, 2, 1));
        assert_eq!(r.fifty_combos_reached, None);
    }
}
