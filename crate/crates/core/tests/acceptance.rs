//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Informational checks print WARN instead.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use asota::factors::{accumulate_capital, implicit_depreciation};
use asota::index::{compute_indices, finalize_asota, IndexOptions, Variant};
use asota::ingest::{parse_records, BenchmarkCorpus, IngestOptions, MetricKind, OrientationTable};
use asota::manifest::{Manifest, Sources};
use asota::production::{doubling_time, factor_share_alpha, fit_mean_log_a, predict_output};
use asota::report::{self, ReportBundle, RunOptions};
use asota::scaling::{effective_alpha, fit_joint_loss, optimal_allocation, JointFitOptions, JointLossFit};
use asota::series::{AnnualSeries, Units};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use common::{fixtures_dir, max_rel_diff, naive_indices, obs, random_observations};

enum Outcome {
    Pass(String),
    Fail(String),
    Warn(String),
}

type Check = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within_budget(outcome: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match (outcome, budget) {
        (Outcome::Pass(d), Some(b)) if elapsed > b => Outcome::Fail(format!("{d}; took {elapsed:?}, budget {b:?}")),
        (o, _) => o,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn series(units: Units, start: i32, values: &[f64]) -> AnnualSeries {
    AnnualSeries::from_pairs(units, values.iter().enumerate().map(|(i, v)| (start + i as i32, *v))).unwrap()
}

fn rate_relation() -> Outcome {
    let k: Vec<f64> = (0..21).map(|i| 1e12 * 2f64.powf(i as f64 / 2.0)).collect();
    let ks = series(Units::FlopPerSec, 2000, &k);
    let ls = series(Units::Persons, 2000, &[5e5; 21]);
    let k_doubling = std::f64::consts::LN_2 / (k[20].ln() - k[0].ln()) * 20.0;
    let t = doubling_time(0.2, Some(k_doubling), None).unwrap();
    let y = predict_output(&ks, &ls, 0.2, 1.0).unwrap();
    let y_doubling = std::f64::consts::LN_2 * 20.0 / (y.get(2020).unwrap() - y.get(2000).unwrap());
    check(
        (t - 10.0).abs() <= 1e-9 && (y_doubling - 10.0).abs() <= 1e-9,
        format!("doubling_time = {t:.12}, model output doubling = {y_doubling:.12} (target 10)"),
    )
}

fn index_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let corpus = BenchmarkCorpus::from_observations(random_observations(&mut rng, 10, 100));
        let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
        let oracle = naive_indices(&corpus, 365);
        for v in Variant::ALL {
            worst = worst.max(max_rel_diff(&set.get(v).values, &oracle[&v]));
        }
    }
    check(
        worst <= 1e-12,
        format!("200 corpora x 7 variants, max rel diff {worst:.2e} (tol 1e-12)"),
    )
}

fn index_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for trial in 0..100 {
        let value = f64::from(rng.random_range(1..500));
        let constant: Vec<_> = (0..rng.random_range(1..40))
            .map(|i| {
                let c = rng.random_range(0..8);
                let kind = if c % 2 == 0 {
                    MetricKind::AccuracyLike
                } else {
                    MetricKind::LossLike
                };
                obs(&format!("c{c}"), rng.random_range(0..200), value, kind, i)
            })
            .collect();
        let set = compute_indices(&BenchmarkCorpus::from_observations(constant), IndexOptions::default()).unwrap();
        if !Variant::CUMULATIVE
            .iter()
            .all(|&v| set.get(v).values.iter().all(|&x| x == 1.0))
        {
            failures.push(format!("constant corpus {trial}"));
        }

        let kind = if trial % 2 == 0 {
            MetricKind::AccuracyLike
        } else {
            MetricKind::LossLike
        };
        let single: Vec<_> = (0..rng.random_range(1..40))
            .map(|i| {
                obs(
                    "solo",
                    rng.random_range(0..200),
                    f64::from(rng.random_range(1..100)),
                    kind,
                    i,
                )
            })
            .collect();
        let set = compute_indices(&BenchmarkCorpus::from_observations(single), IndexOptions::default()).unwrap();
        if set.get(Variant::Ew).values != set.get(Variant::Aw).values {
            failures.push(format!("single combo {trial}"));
        }
    }
    check(
        failures.is_empty(),
        format!("100 constant and 100 single-combo corpora; failures: {failures:?}"),
    )
}

fn capital_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(5..60);
        let invest: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..1000.0)).collect();
        let delta: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.7)).collect();
        let inv = series(Units::FlopPerSec, 1960, &invest);
        let k = accumulate_capital(
            &inv,
            &series(Units::Ratio, 1960, &delta),
            rng.random_range(1.0..1e4),
            1960,
        )
        .unwrap();
        let d_hat = implicit_depreciation(&k, &inv).unwrap();
        let k_again = accumulate_capital(&inv, &d_hat, k.get(1960).unwrap(), 1960).unwrap();
        for (y, v) in k.iter() {
            worst = worst.max(rel(v, k_again.get(y).unwrap()));
        }
    }
    let k_ss = accumulate_capital(
        &series(Units::FlopPerSec, 1960, &[100.0; 61]),
        &series(Units::Ratio, 1960, &[0.3; 61]),
        0.0,
        1960,
    )
    .unwrap()
    .get(2020)
    .unwrap();
    let ss_err = rel(k_ss, 85.0 / 0.3);
    check(
        worst <= 1e-9 && ss_err <= 1e-3,
        format!("round-trip max rel {worst:.2e} (tol 1e-9); K after 60y = {k_ss:.4}, rel err {ss_err:.2e} (tol 1e-3)"),
    )
}

fn factor_shares() -> Outcome {
    let text = fs::read_to_string(fixtures_dir().join("factor_shares_2017.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut alphas = std::collections::BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let a = factor_share_alpha(rec[1].parse().unwrap(), rec[2].parse().unwrap()).unwrap();
        alphas.insert(rec[0].to_string(), a.alpha());
    }
    let (rnd, agg) = (alphas["rnd"], alphas["aggregate"]);
    check(
        (rnd - 0.20).abs() <= 0.03 && (agg - 0.45).abs() <= 0.05,
        format!("alpha rnd = {rnd:.4} (0.20 +/- 0.03), aggregate = {agg:.4} (0.45 +/- 0.05)"),
    )
}

fn ols_recovery() -> Outcome {
    let n = 30;
    let (c, alpha) = (-3.25, 0.2);
    let lk: Vec<f64> = (0..n)
        .map(|i| 20.0 + 0.35 * i as f64 + (i as f64 * 0.7).sin())
        .collect();
    let ll: Vec<f64> = (0..n)
        .map(|i| 13.0 + 0.03 * i as f64 + 0.1 * (i as f64 * 1.3).cos())
        .collect();
    let ly: Vec<f64> = (0..n).map(|i| c + alpha * lk[i] + (1.0 - alpha) * ll[i]).collect();
    let fit = fit_mean_log_a(
        &series(Units::Log, 1990, &ly),
        &series(Units::Log, 1990, &lk),
        &series(Units::Log, 1990, &ll),
        alpha,
    )
    .unwrap();

    let ln_scale = 7.5f64.ln();
    let lk2: Vec<f64> = lk.iter().map(|v| v + ln_scale).collect();
    let scaled = fit_mean_log_a(
        &series(Units::Log, 1990, &ly),
        &series(Units::Log, 1990, &lk2),
        &series(Units::Log, 1990, &ll),
        alpha,
    )
    .unwrap();
    let shift_err = (scaled.mean_log_a - (fit.mean_log_a - alpha * ln_scale)).abs();
    let resid_err = fit
        .residuals
        .iter()
        .zip(scaled.residuals.iter())
        .map(|((_, a), (_, b))| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        (fit.mean_log_a - c).abs() <= 1e-12
            && (fit.r2 - 1.0).abs() <= 1e-12
            && shift_err <= 1e-12
            && resid_err <= 1e-12,
        format!(
            "mean_logA err {:.1e}, R2 = {}, scale shift err {shift_err:.1e}, residual change {resid_err:.1e}",
            (fit.mean_log_a - c).abs(),
            fit.r2
        ),
    )
}

fn joint_samples(truth: &JointLossFit, sigma: f64, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
    let mut out = Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            let d = 10f64.powf(4.0 + 6.0 * i as f64 / 7.0);
            let p = 10f64.powf(4.0 + 6.0 * j as f64 / 7.0);
            let eps = if sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            out.push((d, p, truth.loss(d, p) + eps));
        }
    }
    out
}

fn scaling_recovery() -> Outcome {
    let truth = JointLossFit {
        l_min: 0.2,
        b: 5.0,
        beta: 0.3,
        g: 5.0,
        gamma: 0.3,
        residual_norm: 0.0,
        converged: true,
        iterations: 0,
    };
    let opts = JointFitOptions::default();
    let exact = fit_joint_loss(&joint_samples(&truth, 0.0, 0), &opts).unwrap();
    let exact_err = [
        exact.l_min - truth.l_min,
        exact.b - truth.b,
        exact.beta - truth.beta,
        exact.g - truth.g,
        exact.gamma - truth.gamma,
    ]
    .iter()
    .fold(0.0f64, |m, e| m.max(e.abs()));
    let noisy = fit_joint_loss(&joint_samples(&truth, 1e-3, 20_240_601), &opts).unwrap();
    let noisy_err = (noisy.beta - 0.3).abs().max((noisy.gamma - 0.3).abs());

    let (c, t) = (1e21, 6.0);
    let (d_opt, _) = optimal_allocation(&exact, c, t).unwrap();
    let budget = c / t;
    let mut grid_best = (f64::INFINITY, 0.0);
    for i in 0..=200_000 {
        let d = (budget.ln() - 40.0 + 80.0 * i as f64 / 200_000.0).exp();
        let l = exact.loss(d, budget / d);
        if l < grid_best.0 {
            grid_best = (l, d);
        }
    }
    let alloc_err = rel(d_opt, grid_best.1);
    let eff = effective_alpha(&exact, 0.05).unwrap();
    check(
        exact_err <= 1e-6 && noisy_err <= 0.02 && alloc_err <= 1e-3 && eff == exact.beta / 2.0,
        format!(
            "noiseless max err {exact_err:.1e}; noisy beta {:.4} gamma {:.4}; D* rel err vs grid {alloc_err:.1e}; effective alpha {eff}",
            noisy.beta, noisy.gamma
        ),
    )
}

fn fixture_corpus() -> BenchmarkCorpus {
    let dir = fixtures_dir();
    let table = OrientationTable::read_csv(fs::File::open(dir.join("metric_orientation.csv")).unwrap()).unwrap();
    parse_records(
        fs::File::open(dir.join("benchmark_dump.csv")).unwrap(),
        &table,
        IngestOptions::default(),
    )
    .unwrap()
}

fn asota_finalization() -> Outcome {
    let corpus = fixture_corpus();
    let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
    let asota = finalize_asota(set.get(Variant::Awr), set.get(Variant::N)).unwrap();
    let at_base = asota.value_at(asota.base_date).unwrap();
    use chrono::Datelike;
    check(
        asota.base_date.year() == 2009 && at_base == 1.0,
        format!("base date {}, ASOTA(base) = {at_base}", asota.base_date),
    )
}

fn run_bundle(command: report::Command) -> ReportBundle {
    let manifest = Manifest::load(&fixtures_dir().join("manifest.toml")).unwrap();
    let sources = Sources::new(&manifest);
    let mut bundle = ReportBundle::new();
    report::run(command, &sources, &RunOptions::default(), &mut bundle).unwrap();
    bundle
}

fn paper_scale_fit() -> Outcome {
    let bundle = run_bundle(report::Command::All);
    let text = String::from_utf8(bundle.get("fit_summary.csv").unwrap().to_vec()).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut parts = Vec::new();
    let mut papers = f64::NAN;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let r2: f64 = rec[3].parse().unwrap();
        parts.push(format!("{}={r2:.3}", &rec[0]));
        if &rec[0] == "papers" {
            papers = r2;
        }
    }
    let detail = format!("R2 {} (papers target 0.88, band [0.75, 0.95])", parts.join(" "));
    if (0.75..=0.95).contains(&papers) {
        Outcome::Pass(detail)
    } else {
        Outcome::Warn(detail)
    }
}

fn determinism() -> Outcome {
    let a = run_bundle(report::Command::All);
    let b = run_bundle(report::Command::All);
    check(
        a == b && a.checksum_index() == b.checksum_index(),
        format!(
            "{} files, checksum index identical: {}",
            a.len(),
            a.checksum_index() == b.checksum_index()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Option<Duration>); 10] = [
        ("rate relation", rate_relation, Some(Duration::from_millis(1))),
        ("index oracle equivalence", index_oracle, Some(Duration::from_secs(10))),
        ("index identities", index_identities, None),
        ("capital round-trip", capital_round_trip, None),
        ("factor shares", factor_shares, None),
        ("OLS recovery", ols_recovery, None),
        ("scaling-law recovery", scaling_recovery, Some(Duration::from_secs(30))),
        ("ASOTA finalization", asota_finalization, None),
        ("fixture-scale fits", paper_scale_fit, None),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (tag, detail) = match within_budget(outcome, elapsed, *budget) {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Warn(d) => ("WARN", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {name}: {detail} ({elapsed:.2?})", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
