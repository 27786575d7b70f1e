#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use asota::index::Variant;
use asota::ingest::{BenchmarkCorpus, MetricKind, MetricObservation};
use chrono::{Days, NaiveDate};
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn day0() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 3, 1).unwrap()
}

pub fn obs(combo: &str, day: u64, value: f64, kind: MetricKind, entry: usize) -> MetricObservation {
    MetricObservation {
        combo_id: combo.to_string(),
        date: day0() + Days::new(day),
        value,
        metric_kind: kind,
        metric_name: match kind {
            MetricKind::AccuracyLike => "Accuracy".into(),
            MetricKind::LossLike => "Perplexity".into(),
        },
        entry_id: format!("e{entry}"),
    }
}

/// Random corpus with up to `max_combos` combinations over `max_days` days.
/// Values are drawn from a coarse set so ties and repeats occur.
pub fn random_observations<R: Rng>(rng: &mut R, max_combos: usize, max_days: u64) -> Vec<MetricObservation> {
    let n_combos = rng.random_range(1..=max_combos);
    let mut out = Vec::new();
    let mut entry = 0;
    for c in 0..n_combos {
        let kind = if rng.random_bool(0.5) {
            MetricKind::AccuracyLike
        } else {
            MetricKind::LossLike
        };
        let n_obs = rng.random_range(1..=15);
        for _ in 0..n_obs {
            let day = rng.random_range(0..max_days);
            let value = f64::from(rng.random_range(1..=40)) * 2.5;
            entry += 1;
            out.push(obs(&format!("combo-{c}"), day, value, kind, entry));
        }
    }
    out
}

/// Naive oracle: every day recomputes each combination's previous best,
/// activity and the seeded counts from the raw observations.
pub fn naive_indices(corpus: &BenchmarkCorpus, lookback: i64) -> BTreeMap<Variant, Vec<f64>> {
    let all: Vec<&MetricObservation> = corpus.series.values().flat_map(|s| s.observations.iter()).collect();
    let first = all.iter().map(|o| o.date).min().unwrap();
    let last = all.iter().map(|o| o.date).max().unwrap();
    let first_dates: Vec<NaiveDate> = corpus
        .series
        .values()
        .map(|s| s.observations.iter().map(|o| o.date).min().unwrap())
        .collect();

    let mut levels: BTreeMap<Variant, f64> = Variant::CUMULATIVE.iter().map(|&v| (v, 1.0)).collect();
    let mut out: BTreeMap<Variant, Vec<f64>> = Variant::ALL.iter().map(|&v| (v, Vec::new())).collect();
    let mut t = first;
    while t <= last {
        let n_t = first_dates.iter().filter(|&&d| d <= t).count();
        let lb_date = t - chrono::Duration::days(lookback);
        let n_lb = first_dates.iter().filter(|&&d| d <= lb_date).count();

        let mut improvers: Vec<(f64, f64)> = Vec::new();
        for s in corpus.series.values() {
            let today: Vec<f64> = s.observations.iter().filter(|o| o.date == t).map(|o| o.value).collect();
            if today.is_empty() {
                continue;
            }
            let before: Vec<f64> = s.observations.iter().filter(|o| o.date < t).map(|o| o.value).collect();
            if before.is_empty() {
                continue;
            }
            let best = match s.metric_kind {
                MetricKind::AccuracyLike => before.iter().cloned().fold(f64::MIN, f64::max),
                MetricKind::LossLike => before.iter().cloned().fold(f64::MAX, f64::min),
            };
            let z = today
                .iter()
                .map(|&x| match s.metric_kind {
                    MetricKind::AccuracyLike => (x - best) / best,
                    MetricKind::LossLike => (best - x) / best,
                })
                .fold(0.0, f64::max);
            if z > 0.0 {
                let w = s.observations.iter().filter(|o| o.date <= t).count() as f64;
                improvers.push((z, w));
            }
        }

        let k = improvers.len() as f64;
        let (ew, aw) = if improvers.is_empty() {
            (0.0, 0.0)
        } else {
            let sum_w: f64 = improvers.iter().map(|p| p.1).sum();
            (
                improvers.iter().map(|p| p.0).sum::<f64>() / k,
                improvers.iter().map(|p| p.0 * p.1).sum::<f64>() / sum_w,
            )
        };
        let expanding = if improvers.is_empty() { 0.0 } else { k / n_t as f64 };
        let renewing = if improvers.is_empty() {
            0.0
        } else if n_t == n_lb {
            expanding
        } else {
            k / (n_t - n_lb) as f64
        };
        for (v, d) in [
            (Variant::Ew, ew),
            (Variant::Aw, aw),
            (Variant::Ewe, ew * expanding),
            (Variant::Awe, aw * expanding),
            (Variant::Ewr, ew * renewing),
            (Variant::Awr, aw * renewing),
        ] {
            let level = levels.get_mut(&v).unwrap();
            *level *= 1.0 + d;
            out.get_mut(&v).unwrap().push(*level);
        }
        out.get_mut(&Variant::N).unwrap().push(n_t as f64);
        t = t + Days::new(1);
    }
    out
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
        .fold(0.0, f64::max)
}
