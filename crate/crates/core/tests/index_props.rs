mod common;

use asota::index::{compute_indices, IndexOptions, Variant};
use asota::ingest::{BenchmarkCorpus, MetricKind, MetricObservation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{max_rel_diff, naive_indices, obs, random_observations};

fn corpus_from_seed(seed: u64, max_combos: usize, max_days: u64) -> (Vec<MetricObservation>, BenchmarkCorpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = random_observations(&mut rng, max_combos, max_days);
    let c = BenchmarkCorpus::from_observations(o.clone());
    (o, c)
}

#[test]
fn matches_naive_recompute_on_seeded_corpora() {
    for seed in 0..200 {
        let (_, corpus) = corpus_from_seed(seed, 10, 100);
        let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
        let oracle = naive_indices(&corpus, 365);
        for v in Variant::ALL {
            let d = max_rel_diff(&set.get(v).values, &oracle[&v]);
            assert!(d <= 1e-12, "seed {seed} variant {v}: rel diff {d}");
        }
    }
}

#[test]
fn short_lookback_exercises_renewing_denominator() {
    for seed in 0..50 {
        let (_, corpus) = corpus_from_seed(1000 + seed, 8, 120);
        let opts = IndexOptions {
            lookback_days: 20,
            ..IndexOptions::default()
        };
        let set = compute_indices(&corpus, opts).unwrap();
        let oracle = naive_indices(&corpus, 20);
        for v in [Variant::Ewr, Variant::Awr] {
            let d = max_rel_diff(&set.get(v).values, &oracle[&v]);
            assert!(d <= 1e-12, "seed {seed} variant {v}: rel diff {d}");
        }
    }
}

#[test]
fn single_entry_corpus_stays_at_one() {
    let corpus = BenchmarkCorpus::from_observations([obs("a", 0, 10.0, MetricKind::AccuracyLike, 1)]);
    let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
    for v in Variant::CUMULATIVE {
        assert_eq!(set.get(v).values, vec![1.0]);
    }
    assert_eq!(set.get(Variant::N).values, vec![1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cumulative_indices_never_fall(seed in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed, 10, 150);
        let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
        for v in Variant::CUMULATIVE {
            let vals = &set.get(v).values;
            prop_assert_eq!(vals[0], 1.0);
            for w in vals.windows(2) {
                prop_assert!(w[1] >= w[0], "{} fell: {} -> {}", v, w[0], w[1]);
            }
        }
        let n = &set.get(Variant::N).values;
        prop_assert!(n.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn input_order_does_not_matter(seed in any::<u64>()) {
        let (mut o, corpus) = corpus_from_seed(seed, 10, 100);
        let reference = compute_indices(&corpus, IndexOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        o.shuffle(&mut rng);
        let shuffled = compute_indices(&BenchmarkCorpus::from_observations(o), IndexOptions::default()).unwrap();
        for v in Variant::ALL {
            prop_assert!(max_rel_diff(&reference.get(v).values, &shuffled.get(v).values) <= 1e-12);
        }
    }

    #[test]
    fn relabeling_combos_does_not_matter(seed in any::<u64>()) {
        let (o, corpus) = corpus_from_seed(seed, 10, 100);
        let reference = compute_indices(&corpus, IndexOptions::default()).unwrap();
        let renamed = o.into_iter().map(|mut x| {
            x.combo_id = format!("zz-{}", x.combo_id.chars().rev().collect::<String>());
            x
        });
        let other = compute_indices(&BenchmarkCorpus::from_observations(renamed), IndexOptions::default()).unwrap();
        for v in Variant::ALL {
            prop_assert!(max_rel_diff(&reference.get(v).values, &other.get(v).values) <= 1e-12);
        }
    }

    #[test]
    fn expanding_never_exceeds_base(seed in any::<u64>()) {
        let (_, corpus) = corpus_from_seed(seed, 10, 150);
        let set = compute_indices(&corpus, IndexOptions::default()).unwrap();
        let pairs = [(Variant::Ewe, Variant::Ew), (Variant::Awe, Variant::Aw)];
        for (lo, hi) in pairs {
            for (a, b) in set.get(lo).values.iter().zip(&set.get(hi).values) {
                prop_assert!(*a <= *b * (1.0 + 1e-12), "{} {} > {} {}", lo, a, hi, b);
            }
        }
    }

    #[test]
    fn single_combo_weights_coincide(
        kind_acc in any::<bool>(),
        values in prop::collection::vec((0u64..200, 1u32..100), 1..40),
    ) {
        let kind = if kind_acc { MetricKind::AccuracyLike } else { MetricKind::LossLike };
        let o = values.iter().enumerate().map(|(i, &(day, v))| obs("only", day, f64::from(v), kind, i));
        let set = compute_indices(&BenchmarkCorpus::from_observations(o), IndexOptions::default()).unwrap();
        prop_assert_eq!(&set.get(Variant::Ew).values, &set.get(Variant::Aw).values);
        prop_assert_eq!(&set.get(Variant::Ew).values, &set.get(Variant::Ewe).values);
    }

    #[test]
    fn constant_corpus_is_flat(
        value in 1u32..1000,
        layout in prop::collection::vec((0usize..6, 0u64..300), 1..60),
    ) {
        let o = layout.iter().enumerate().map(|(i, &(c, day))| {
            let kind = if c % 2 == 0 { MetricKind::AccuracyLike } else { MetricKind::LossLike };
            obs(&format!("c{c}"), day, f64::from(value), kind, i)
        });
        let set = compute_indices(&BenchmarkCorpus::from_observations(o), IndexOptions::default()).unwrap();
        for v in Variant::CUMULATIVE {
            prop_assert!(set.get(v).values.iter().all(|&x| x == 1.0));
        }
    }
}
