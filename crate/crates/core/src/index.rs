//! Daily-frequency aggregate progress measures over a benchmark corpus.
//!
//! For every day on the corpus grid each combination with entries that day gets
//! an improvement rate against its best value through the previous day. The
//! rates are aggregated into seven measures: the metrics count `N` and six
//! cumulative indices (equal- or activity-weighted, plain, expanding or
//! renewing). The activity-weighted renewing index, logged and anchored to 1 on
//! the first day with 50 seeded combinations, is the aggregate SOTA index.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{Datelike, Days, NaiveDate};
use thiserror::Error;

use crate::ingest::{BenchmarkCorpus, MetricKind};
use crate::series::{AnnualSeries, Units};

/// Seeded-combination count at which the aggregate SOTA index is anchored.
pub const ASOTA_BASE_COUNT: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("improvement rate undefined: previous best {best_prev} is not positive")]
    UndefinedRate { best_prev: f64 },
    #[error("variant {0} is a count, not a cumulative index")]
    NotCumulative(Variant),
    #[error("no date on the grid reaches {ASOTA_BASE_COUNT} combinations")]
    NoBaseDate,
    #[error("normalization undefined: log of the index at the base date is zero ({0:?})")]
    NormalizationUndefined(Option<NaiveDate>),
    #[error("series are on different grids")]
    GridMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    N,
    Ew,
    Aw,
    Ewe,
    Awe,
    Ewr,
    Awr,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::N,
        Variant::Ew,
        Variant::Aw,
        Variant::Ewe,
        Variant::Awe,
        Variant::Ewr,
        Variant::Awr,
    ];
    pub const CUMULATIVE: [Variant; 6] = [
        Variant::Ew,
        Variant::Aw,
        Variant::Ewe,
        Variant::Awe,
        Variant::Ewr,
        Variant::Awr,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            Variant::N => "n",
            Variant::Ew => "ew",
            Variant::Aw => "aw",
            Variant::Ewe => "ewe",
            Variant::Awe => "awe",
            Variant::Ewr => "ewr",
            Variant::Awr => "awr",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::N => "N",
            Variant::Ew => "EW",
            Variant::Aw => "AW",
            Variant::Ewe => "EWE",
            Variant::Awe => "AWE",
            Variant::Ewr => "EWR",
            Variant::Awr => "AWR",
        })
    }
}

/// How the running best of a loss-like metric is tracked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BestMode {
    /// Running maximum for accuracy-like, running minimum for loss-like.
    #[default]
    StateOfTheArt,
    /// Running maximum for both kinds, as the formula is literally printed.
    StrictFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexOptions {
    pub best_mode: BestMode,
    pub lookback_days: u64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            best_mode: BestMode::StateOfTheArt,
            lookback_days: 365,
        }
    }
}

/// Clamped improvement rate of `x` over the previous best.
pub fn improvement_rate(x: f64, best_prev: f64, kind: MetricKind) -> Result<f64, IndexError> {
    if best_prev <= 0.0 || !best_prev.is_finite() {
        return Err(IndexError::UndefinedRate { best_prev });
    }
    let raw = match kind {
        MetricKind::AccuracyLike => x / best_prev - 1.0,
        MetricKind::LossLike => 1.0 - x / best_prev,
    };
    Ok(raw.max(0.0))
}

/// Per-combination running state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BestSoFar {
    pub best: Option<f64>,
    pub first_entry_date: Option<NaiveDate>,
    pub entry_count_to_date: u64,
}

impl BestSoFar {
    fn absorb(&mut self, date: NaiveDate, day_values: &[f64], kind: MetricKind, mode: BestMode) {
        let better = |a: f64, b: f64| match (mode, kind) {
            (BestMode::StrictFormula, _) | (_, MetricKind::AccuracyLike) => a > b,
            (BestMode::StateOfTheArt, MetricKind::LossLike) => a < b,
        };
        for &v in day_values {
            self.best = Some(match self.best {
                Some(b) if !better(v, b) => b,
                _ => v,
            });
        }
        self.first_entry_date.get_or_insert(date);
        self.entry_count_to_date += day_values.len() as u64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboImprovement {
    /// Position of the combination in [`Scan::combo_ids`].
    pub combo: usize,
    pub z: f64,
    /// Entries recorded for the combination through this day, inclusive.
    pub activity: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyImprovements {
    pub date: NaiveDate,
    /// Every combination with at least one entry on this day, in combo order.
    pub entries: Vec<ComboImprovement>,
    pub improver_count: usize,
    pub metrics_count: usize,
    pub metrics_count_lookback: usize,
}

impl DailyImprovements {
    pub fn improvers(&self) -> impl Iterator<Item = &ComboImprovement> {
        self.entries.iter().filter(|e| e.z > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub combo_ids: Vec<String>,
    pub days: Vec<DailyImprovements>,
    /// Entries skipped because their rate was undefined.
    pub excluded_entries: usize,
    pub final_state: Vec<BestSoFar>,
}

impl Scan {
    pub fn start(&self) -> Option<NaiveDate> {
        self.days.first().map(|d| d.date)
    }
}

/// Walks the contiguous daily grid spanning the corpus.
pub fn scan_daily(corpus: &BenchmarkCorpus, opts: IndexOptions) -> Scan {
    let combos: Vec<_> = corpus.series.values().collect();
    let combo_ids = combos.iter().map(|s| s.combo_id.clone()).collect();
    let mut state = vec![BestSoFar::default(); combos.len()];

    let Some((first, last)) = corpus.date_range() else {
        return Scan {
            combo_ids,
            days: Vec::new(),
            excluded_entries: 0,
            final_state: state,
        };
    };

    // date -> [(combo, values that day)], combos in key order
    let mut events: BTreeMap<NaiveDate, Vec<(usize, Vec<f64>)>> = BTreeMap::new();
    for (ci, s) in combos.iter().enumerate() {
        for o in &s.observations {
            let day = events.entry(o.date).or_default();
            match day.last_mut() {
                Some((c, vals)) if *c == ci => vals.push(o.value),
                _ => day.push((ci, vec![o.value])),
            }
        }
    }

    let mut days = Vec::new();
    let mut history: Vec<usize> = Vec::new();
    let mut seeded = 0usize;
    let mut excluded = 0usize;
    let lookback = opts.lookback_days as usize;
    let empty = Vec::new();

    let mut date = first;
    while date <= last {
        let todays = events.get(&date).unwrap_or(&empty);
        let mut entries = Vec::with_capacity(todays.len());
        for (ci, vals) in todays {
            let kind = combos[*ci].metric_kind;
            let prev = state[*ci];
            let z = match prev.best {
                None => 0.0,
                Some(best) => {
                    let mut z = 0.0f64;
                    for &x in vals {
                        match improvement_rate(x, best, kind) {
                            Ok(r) => z = z.max(r),
                            Err(e) => {
                                excluded += 1;
                                log::debug!("{} on {date}: {e}", combos[*ci].combo_id);
                            }
                        }
                    }
                    z
                }
            };
            entries.push(ComboImprovement {
                combo: *ci,
                z,
                activity: prev.entry_count_to_date + vals.len() as u64,
            });
        }
        for (ci, vals) in todays {
            if state[*ci].first_entry_date.is_none() {
                seeded += 1;
            }
            state[*ci].absorb(date, vals, combos[*ci].metric_kind, opts.best_mode);
        }
        history.push(seeded);
        let idx = history.len() - 1;
        let metrics_count_lookback = if idx >= lookback { history[idx - lookback] } else { 0 };
        let improver_count = entries.iter().filter(|e| e.z > 0.0).count();
        days.push(DailyImprovements {
            date,
            entries,
            improver_count,
            metrics_count: seeded,
            metrics_count_lookback,
        });
        date = date + Days::new(1);
    }

    if excluded > 0 {
        log::warn!("{excluded} entries excluded: improvement rate undefined");
    }
    Scan {
        combo_ids,
        days,
        excluded_entries: excluded,
        final_state: state,
    }
}

/// The day's increment for one cumulative variant. Days without improvers give 0.
pub fn daily_delta(day: &DailyImprovements, variant: Variant) -> Result<f64, IndexError> {
    if variant == Variant::N {
        return Err(IndexError::NotCumulative(variant));
    }
    let n_imp = day.improver_count;
    if n_imp == 0 {
        return Ok(0.0);
    }
    let sum_z: f64 = day.improvers().map(|e| e.z).sum();
    let equal = sum_z / n_imp as f64;
    let activity = || {
        let total: f64 = day.improvers().map(|e| e.activity as f64).sum();
        day.improvers().map(|e| e.z * (e.activity as f64 / total)).sum::<f64>()
    };
    let expanding = n_imp as f64 / day.metrics_count as f64;
    let renewing = || {
        let denom = day.metrics_count - day.metrics_count_lookback;
        if denom == 0 {
            log::warn!(
                "{}: no combinations added during lookback, using expanding denominator",
                day.date
            );
            expanding
        } else {
            n_imp as f64 / denom as f64
        }
    };
    Ok(match variant {
        Variant::N => unreachable!(),
        Variant::Ew => equal,
        Variant::Aw => activity(),
        Variant::Ewe => equal * expanding,
        Variant::Awe => activity() * expanding,
        Variant::Ewr => equal * renewing(),
        Variant::Awr => activity() * renewing(),
    })
}

/// A value per day on a contiguous grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub variant: Variant,
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

impl IndexSeries {
    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.start + Days::new(i as u64)
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        let offset = (date - self.start).num_days();
        usize::try_from(offset).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.date_at(i), *v))
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Cumulative product of `1 + delta` over consecutive days starting at `start`.
pub fn accumulate(variant: Variant, start: NaiveDate, deltas: &[f64]) -> IndexSeries {
    let mut level = 1.0;
    let values = deltas
        .iter()
        .map(|d| {
            level *= 1.0 + d;
            level
        })
        .collect();
    IndexSeries { variant, start, values }
}

/// Combinations with at least one entry dated on or before `t`.
pub fn metrics_count(corpus: &BenchmarkCorpus, t: NaiveDate) -> usize {
    corpus
        .series
        .values()
        .filter(|s| s.first_date().is_some_and(|d| d <= t))
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub scan: Scan,
    pub deltas: BTreeMap<Variant, Vec<f64>>,
    pub series: BTreeMap<Variant, IndexSeries>,
}

impl IndexSet {
    pub fn get(&self, v: Variant) -> &IndexSeries {
        &self.series[&v]
    }
}

/// Runs the scan and builds all seven series. An empty corpus gives empty
/// series starting at the Unix epoch.
pub fn compute_indices(corpus: &BenchmarkCorpus, opts: IndexOptions) -> Result<IndexSet, IndexError> {
    let scan = scan_daily(corpus, opts);
    let start = scan
        .start()
        .unwrap_or_else(|| NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date"));
    let mut deltas = BTreeMap::new();
    let mut series = BTreeMap::new();
    series.insert(
        Variant::N,
        IndexSeries {
            variant: Variant::N,
            start,
            values: scan.days.iter().map(|d| d.metrics_count as f64).collect(),
        },
    );
    for v in Variant::CUMULATIVE {
        let d = scan
            .days
            .iter()
            .map(|day| daily_delta(day, v))
            .collect::<Result<Vec<_>, _>>()?;
        series.insert(v, accumulate(v, start, &d));
        deltas.insert(v, d);
    }
    Ok(IndexSet { scan, deltas, series })
}

/// Log of the activity-weighted renewing index, anchored to 1 at `base_date`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsotaSeries {
    pub base_date: NaiveDate,
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

impl AsotaSeries {
    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.start + Days::new(i as u64), *v))
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        let offset = (date - self.start).num_days();
        usize::try_from(offset).ok().and_then(|i| self.values.get(i).copied())
    }

    /// Level reached at the last grid day of each year from the base year on.
    pub fn annual(&self) -> AnnualSeries {
        let mut points = BTreeMap::new();
        for (date, v) in self.iter() {
            if date.year() >= self.base_date.year() {
                points.insert(date.year(), v);
            }
        }
        AnnualSeries::from_map(Units::Log, points)
    }
}

pub fn finalize_asota(awr: &IndexSeries, counts: &IndexSeries) -> Result<AsotaSeries, IndexError> {
    if awr.start != counts.start || awr.values.len() != counts.values.len() {
        return Err(IndexError::GridMismatch);
    }
    if awr.values.is_empty() {
        return Err(IndexError::NormalizationUndefined(None));
    }
    let base_idx = counts
        .values
        .iter()
        .position(|&n| n >= ASOTA_BASE_COUNT as f64)
        .ok_or(IndexError::NoBaseDate)?;
    let base_date = awr.date_at(base_idx);
    let base_log = awr.values[base_idx].ln();
    if base_log == 0.0 {
        return Err(IndexError::NormalizationUndefined(Some(base_date)));
    }
    Ok(AsotaSeries {
        base_date,
        start: awr.start,
        values: awr.values.iter().map(|v| v.ln() / base_log).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub date: NaiveDate,
    pub n_improvers: usize,
    /// Improver with the largest activity-weighted contribution that day.
    pub example_combo: Option<String>,
    pub delta: f64,
}

/// Annotations for the given dates, or for the `top` largest AWR increments
/// (in date order) when `dates` is empty.
pub fn annotate(set: &IndexSet, dates: &[NaiveDate], top: usize) -> Vec<Annotation> {
    let scan = &set.scan;
    let deltas = &set.deltas[&Variant::Awr];
    let Some(start) = scan.start() else {
        return Vec::new();
    };
    let indices: Vec<usize> = if dates.is_empty() {
        let mut ranked: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i] > 0.0).collect();
        ranked.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]).then(a.cmp(&b)));
        ranked.truncate(top);
        ranked.sort_unstable();
        ranked
    } else {
        dates
            .iter()
            .filter_map(|d| usize::try_from((*d - start).num_days()).ok())
            .filter(|&i| i < scan.days.len())
            .collect()
    };
    indices
        .into_iter()
        .map(|i| {
            let day = &scan.days[i];
            let mut best: Option<&ComboImprovement> = None;
            for e in day.improvers() {
                let score = e.z * e.activity as f64;
                if best.is_none_or(|b| score > b.z * b.activity as f64) {
                    best = Some(e);
                }
            }
            Annotation {
                date: day.date,
                n_improvers: day.improver_count,
                example_combo: best.map(|b| scan.combo_ids[b.combo].clone()),
                delta: deltas[i],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::MetricObservation;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn obs(combo: &str, date: &str, value: f64, kind: MetricKind) -> MetricObservation {
        MetricObservation {
            combo_id: combo.into(),
            date: d(date),
            value,
            metric_kind: kind,
            metric_name: "m".into(),
            entry_id: format!("{combo}-{date}-{value}"),
        }
    }

    const ACC: MetricKind = MetricKind::AccuracyLike;

    #[test]
    fn improvement_rate_examples() {
        assert!((improvement_rate(0.88, 0.80, ACC).unwrap() - 0.10).abs() < 1e-12);
        assert_eq!(improvement_rate(0.80, 0.80, ACC).unwrap(), 0.0);
        assert!((improvement_rate(0.40, 0.50, MetricKind::LossLike).unwrap() - 0.20).abs() < 1e-12);
        assert_eq!(improvement_rate(0.70, 0.80, ACC).unwrap(), 0.0);
        assert_eq!(
            improvement_rate(1.0, 0.0, ACC),
            Err(IndexError::UndefinedRate { best_prev: 0.0 })
        );
    }

    #[test]
    fn scan_two_day_trace() {
        let c =
            BenchmarkCorpus::from_observations([obs("a", "2020-01-01", 0.5, ACC), obs("a", "2020-01-02", 0.6, ACC)]);
        let scan = scan_daily(&c, IndexOptions::default());
        assert_eq!(scan.days.len(), 2);
        let day2 = &scan.days[1];
        assert!((day2.entries[0].z - 0.2).abs() < 1e-12);
        assert_eq!(day2.metrics_count, 1);
        assert_eq!(day2.entries[0].activity, 2);
    }

    #[test]
    fn day_one_baseline_and_within_day_best() {
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 0.5, ACC),
            obs("a", "2020-01-01", 0.7, ACC),
            obs("a", "2020-01-02", 0.75, ACC),
        ]);
        let scan = scan_daily(&c, IndexOptions::default());
        assert_eq!(scan.days[0].entries[0].z, 0.0);
        assert_eq!(scan.days[0].improver_count, 0);
        // second day compares against 0.7, the best after day one closed
        assert!((scan.days[1].entries[0].z - (0.75 / 0.7 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn same_day_entries_compare_against_previous_day_best() {
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 0.5, ACC),
            obs("a", "2020-01-02", 0.6, ACC),
            obs("a", "2020-01-02", 0.55, ACC),
        ]);
        let scan = scan_daily(&c, IndexOptions::default());
        assert!((scan.days[1].entries[0].z - 0.2).abs() < 1e-12);
        assert_eq!(scan.final_state[0].best, Some(0.6));
    }

    #[test]
    fn never_improving_combo_has_zero_rates() {
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 0.5, ACC),
            obs("a", "2020-01-05", 0.5, ACC),
            obs("a", "2020-01-09", 0.4, ACC),
        ]);
        let set = compute_indices(&c, IndexOptions::default()).unwrap();
        assert!(set.scan.days.iter().all(|d| d.entries.iter().all(|e| e.z == 0.0)));
        for v in Variant::CUMULATIVE {
            assert!(set.get(v).values.iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn strict_mode_tracks_max_for_loss() {
        let loss = MetricKind::LossLike;
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 10.0, loss),
            obs("a", "2020-01-02", 8.0, loss),
            obs("a", "2020-01-03", 6.0, loss),
        ]);
        let sota = scan_daily(&c, IndexOptions::default());
        assert!((sota.days[2].entries[0].z - 0.25).abs() < 1e-12);
        let strict = scan_daily(
            &c,
            IndexOptions {
                best_mode: BestMode::StrictFormula,
                ..Default::default()
            },
        );
        // best stays at 10
        assert!((strict.days[2].entries[0].z - 0.4).abs() < 1e-12);
    }

    fn synthetic_day(zs: &[(f64, u64)], n: usize, lookback: usize) -> DailyImprovements {
        DailyImprovements {
            date: d("2020-01-01"),
            entries: zs
                .iter()
                .enumerate()
                .map(|(i, &(z, activity))| ComboImprovement { combo: i, z, activity })
                .collect(),
            improver_count: zs.iter().filter(|e| e.0 > 0.0).count(),
            metrics_count: n,
            metrics_count_lookback: lookback,
        }
    }

    #[test]
    fn delta_examples() {
        let day = synthetic_day(&[(0.1, 1), (0.3, 3)], 4, 0);
        assert!((daily_delta(&day, Variant::Ew).unwrap() - 0.2).abs() < 1e-12);
        assert!((daily_delta(&day, Variant::Aw).unwrap() - 0.25).abs() < 1e-12);
        assert!((daily_delta(&day, Variant::Ewe).unwrap() - 0.1).abs() < 1e-12);
        assert!((daily_delta(&day, Variant::Awe).unwrap() - 0.125).abs() < 1e-12);
        let quiet = synthetic_day(&[(0.0, 5)], 4, 0);
        for v in Variant::CUMULATIVE {
            assert_eq!(daily_delta(&quiet, v).unwrap(), 0.0);
        }
        assert_eq!(
            daily_delta(&day, Variant::N),
            Err(IndexError::NotCumulative(Variant::N))
        );
    }

    #[test]
    fn renewing_denominator_and_fallback() {
        let day = synthetic_day(&[(0.1, 1), (0.3, 3)], 10, 6);
        // EW 0.2, times 2 improvers over 4 new combinations
        assert!((daily_delta(&day, Variant::Ewr).unwrap() - 0.1).abs() < 1e-12);
        let stale = synthetic_day(&[(0.1, 1), (0.3, 3)], 10, 10);
        assert!(
            (daily_delta(&stale, Variant::Ewr).unwrap() - daily_delta(&stale, Variant::Ewe).unwrap()).abs() < 1e-15
        );
    }

    #[test]
    fn accumulate_examples() {
        let s = accumulate(Variant::Ew, d("2020-01-01"), &[0.0, 0.1, 0.0]);
        assert_eq!(s.values[0], 1.0);
        assert!((s.values[1] - 1.1).abs() < 1e-15);
        assert_eq!(s.values[1], s.values[2]);
        assert_eq!(accumulate(Variant::Ew, d("2020-01-01"), &[0.5]).values, vec![1.5]);
        assert!(accumulate(Variant::Ew, d("2020-01-01"), &[0.0; 5])
            .values
            .iter()
            .all(|&v| v == 1.0));
    }

    #[test]
    fn asota_ratio_of_logs() {
        let e = std::f64::consts::E;
        let start = d("2020-01-01");
        let awr = IndexSeries {
            variant: Variant::Awr,
            start,
            values: vec![1.0, e, e * e],
        };
        let counts = IndexSeries {
            variant: Variant::N,
            start,
            values: vec![10.0, 50.0, 60.0],
        };
        let a = finalize_asota(&awr, &counts).unwrap();
        assert_eq!(a.base_date, d("2020-01-02"));
        assert_eq!(a.values[1], 1.0);
        assert!((a.values[2] - 2.0).abs() < 1e-12);
        assert_eq!(a.values[0], 0.0);
    }

    #[test]
    fn asota_errors() {
        let start = d("2020-01-01");
        let flat = IndexSeries {
            variant: Variant::Awr,
            start,
            values: vec![1.0, 1.0],
        };
        let counts = IndexSeries {
            variant: Variant::N,
            start,
            values: vec![50.0, 51.0],
        };
        assert_eq!(
            finalize_asota(&flat, &counts),
            Err(IndexError::NormalizationUndefined(Some(start)))
        );
        let few = IndexSeries {
            values: vec![1.0, 2.0],
            ..counts.clone()
        };
        assert_eq!(finalize_asota(&flat, &few), Err(IndexError::NoBaseDate));
    }

    #[test]
    fn metrics_count_edges() {
        let c =
            BenchmarkCorpus::from_observations([obs("a", "2020-01-05", 0.5, ACC), obs("b", "2020-01-07", 0.5, ACC)]);
        assert_eq!(metrics_count(&c, d("2020-01-01")), 0);
        assert_eq!(metrics_count(&c, d("2020-01-05")), 1);
        assert_eq!(metrics_count(&c, d("2021-01-01")), 2);
    }

    #[test]
    fn lookback_counts_calendar_days() {
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 0.5, ACC),
            obs("b", "2020-06-01", 0.5, ACC),
            obs("a", "2021-01-01", 0.6, ACC),
        ]);
        let scan = scan_daily(&c, IndexOptions::default());
        let last = scan.days.last().unwrap();
        // 2020 is a leap year: 365 days before 2021-01-01 is 2020-01-02
        assert_eq!(last.metrics_count, 2);
        assert_eq!(last.metrics_count_lookback, 1);
    }

    #[test]
    fn annotations_pick_heaviest_improver() {
        let c = BenchmarkCorpus::from_observations([
            obs("a", "2020-01-01", 0.5, ACC),
            obs("b", "2020-01-01", 0.5, ACC),
            obs("b", "2020-01-02", 0.5, ACC),
            obs("a", "2020-01-03", 0.55, ACC),
            obs("b", "2020-01-03", 0.6, ACC),
        ]);
        let set = compute_indices(&c, IndexOptions::default()).unwrap();
        let ann = annotate(&set, &[d("2020-01-03")], 10);
        assert_eq!(ann.len(), 1);
        assert_eq!(ann[0].n_improvers, 2);
        assert_eq!(ann[0].example_combo.as_deref(), Some("b"));
        let auto = annotate(&set, &[], 10);
        assert_eq!(auto.len(), 1);
        assert_eq!(auto[0].date, d("2020-01-03"));
    }
}
