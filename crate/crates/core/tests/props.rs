//! Randomized invariants over the text pipeline, the shape algebra of the
//! conv/pool stages, the split/vote bookkeeping and the recall metric.

use std::collections::HashSet;

use proptest::prelude::*;

use gifrec_core::corpus::CategoryInventory;
use gifrec_core::ensemble::{instance_recall, majority_vote, mean_recall, top_k_indices};
use gifrec_core::nn::conv::{conv1d_forward, conv2d_forward};
use gifrec_core::nn::pool::{maxpool1d_forward, maxpool2d_forward};
use gifrec_core::nn::{Activation, RngStream, Tensor};
use gifrec_core::text::{encode, tokenize, Cleaner, Vocabulary};
use gifrec_core::train::split_indices;

fn letters() -> CategoryInventory {
    let names: Vec<String> = "abcdefghijklmnopqrstuvwxyz"
        .chars()
        .map(|c| c.to_string())
        .collect();
    CategoryInventory::from_names(names).unwrap()
}

fn random_tensor(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut rng = RngStream::new(seed);
    let mut t = Tensor::<f64>::zeros(shape);
    for v in t.data_mut() {
        *v = rng.uniform(-1.0, 1.0);
    }
    t
}

proptest! {
    /// Cleaning twice is the same as cleaning once, whatever the input.
    #[test]
    fn cleaning_is_idempotent(raw in "\\PC{0,80}") {
        let cleaner = Cleaner::default();
        let once = cleaner.clean(&raw);
        prop_assert_eq!(cleaner.clean(&once), once.clone());

        let strict = Cleaner { strict_hashtags: true, ..Cleaner::default() };
        let once = strict.clean(&raw);
        prop_assert_eq!(strict.clean(&once), once);
    }

    /// Tokens never contain whitespace, and re-tokenizing their join gives
    /// the same list back.
    #[test]
    fn tokenization_is_stable_under_rejoining(raw in "\\PC{0,80}") {
        let tokens = tokenize(&Cleaner::default().clean(&raw));
        for t in &tokens {
            prop_assert!(!t.is_empty());
            prop_assert!(!t.chars().any(char::is_whitespace));
        }
        let rejoined = tokens.join(" ");
        prop_assert_eq!(tokenize(&rejoined), tokens);
    }

    /// Encoding always yields exactly `max_len` ids, every one a valid row
    /// of the embedding table.
    #[test]
    fn encoded_ids_have_fixed_length_and_stay_in_table(
        words in proptest::collection::vec("[a-z]{1,6}", 0..20),
        max_len in 1usize..16,
    ) {
        let docs = vec![words.clone()];
        let vocab = Vocabulary::build(docs.iter().map(|d| d.iter()), 10, 1);
        let ids = encode(&words, &vocab, max_len);
        prop_assert_eq!(ids.len(), max_len);
        for &id in &ids {
            prop_assert!((id as usize) < vocab.table_rows());
        }
    }

    /// Top-k picks distinct indices ordered by score descending, index
    /// ascending on ties, and boosting a winner never evicts it.
    #[test]
    fn top_k_orders_by_score_then_index(
        scores in proptest::collection::vec(0.0f64..1.0, 1..30),
        k in 1usize..10,
    ) {
        let top = top_k_indices(&scores, k);
        prop_assert_eq!(top.len(), k.min(scores.len()));
        let distinct: HashSet<usize> = top.iter().copied().collect();
        prop_assert_eq!(distinct.len(), top.len());
        for pair in top.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            prop_assert!(scores[a] > scores[b] || (scores[a] == scores[b] && a < b));
        }
        // Everything outside the pick scores no better than the last pick.
        if let Some(&last) = top.last() {
            for (i, &s) in scores.iter().enumerate() {
                if !distinct.contains(&i) {
                    prop_assert!(s <= scores[last]);
                }
            }
        }

        // Monotonicity: raising the first winner's score keeps it first.
        let mut boosted = scores.clone();
        boosted[top[0]] += 1.0;
        prop_assert_eq!(top_k_indices(&boosted, k)[0], top[0]);
    }

    /// Recommending every category scores a full recall on any gold set.
    #[test]
    fn exhaustive_recommendation_has_recall_one(
        gold in proptest::collection::hash_set(0usize..26, 1..6),
    ) {
        let inv = letters();
        let all: Vec<String> = inv.names().to_vec();
        let gold: Vec<String> = gold.into_iter().map(|i| inv.name(i).to_string()).collect();
        prop_assert_eq!(instance_recall(&all, &gold), 1.0);
    }

    /// Mean recall is the plain average and sits inside [0, 1].
    #[test]
    fn mean_recall_averages(values in proptest::collection::vec(0.0f64..=1.0, 1..50)) {
        let mr = mean_recall(values.iter().copied()).unwrap();
        let direct = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!((mr - direct).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&mr));
    }

    /// The two split halves partition 0..n exactly, at the floor cut.
    #[test]
    fn split_halves_partition_the_index_range(
        n in 0usize..200,
        ratio in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let (train, val) = split_indices(n, ratio, seed);
        prop_assert_eq!(train.len(), (ratio * n as f64).floor() as usize);
        let mut all: Vec<usize> = train.iter().chain(val.iter()).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    /// The vote output holds min(k, distinct) distinct labels, and no
    /// unselected label out-votes a selected one.
    #[test]
    fn vote_selects_the_most_frequent_labels(
        picks in proptest::collection::vec(
            proptest::collection::hash_set(0usize..26, 6),
            1..6,
        ),
        k in 1usize..8,
    ) {
        // Real members always carry six *distinct* labels.
        let inv = letters();
        let members: Vec<(Vec<String>, Vec<f64>)> = picks
            .iter()
            .map(|ids| {
                let mut ids: Vec<usize> = ids.iter().copied().collect();
                ids.sort_unstable();
                let names: Vec<String> =
                    ids.iter().map(|&i| inv.name(i).to_string()).collect();
                let scores = (0..names.len()).map(|j| 0.9 - 0.1 * j as f64).collect();
                (names, scores)
            })
            .collect();
        let views: Vec<(&[String], &[f64])> = members
            .iter()
            .map(|(n, s)| (n.as_slice(), s.as_slice()))
            .collect();
        let (names, freqs) = majority_vote(&views, &inv, k).unwrap();

        let distinct_labels: HashSet<usize> = picks.iter().flatten().copied().collect();
        prop_assert_eq!(names.len(), k.min(distinct_labels.len()));
        let picked: HashSet<&String> = names.iter().collect();
        prop_assert_eq!(picked.len(), names.len());

        // Brute-force recount of each label's frequency.
        let count = |label: &str| -> f64 {
            picks
                .iter()
                .filter(|ids| ids.contains(&inv.index_of(label).unwrap()))
                .count() as f64
        };
        for (name, &freq) in names.iter().zip(freqs.iter()) {
            prop_assert_eq!(count(name), freq);
        }
        let floor = freqs.last().copied().unwrap_or(0.0);
        for &label in &distinct_labels {
            let name = inv.name(label);
            if !picked.contains(&name.to_string()) {
                prop_assert!(count(name) <= floor);
            }
        }
    }

    /// Same-padded conv keeps the time axis; pooling divides it (remainder
    /// dropped). The closed-form shapes must match direct construction.
    #[test]
    fn conv_and_pool_shapes_follow_the_closed_forms(
        t_len in 1usize..12,
        c_in in 1usize..5,
        f_out in 1usize..5,
        k in 1usize..6,
        pool in 1usize..4,
        seed in any::<u64>(),
    ) {
        let x = random_tensor(&[t_len, c_in], seed);
        let w = random_tensor(&[f_out, k, c_in], seed ^ 1);
        let b = random_tensor(&[f_out], seed ^ 2);
        let (y, _) = conv1d_forward(&x, &w, &b, Activation::Relu);
        prop_assert_eq!(y.shape(), &[t_len, f_out]);
        if t_len >= pool {
            let (p, _) = maxpool1d_forward(&y, pool);
            prop_assert_eq!(p.shape(), &[t_len / pool, f_out]);
        }
    }

    /// The 2-d grid variant: same padding on both spatial axes, then an
    /// independent window division per axis.
    #[test]
    fn conv2d_grid_shapes_follow_the_closed_forms(
        h in 2usize..10,
        wd in 2usize..10,
        f_out in 1usize..4,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let x = random_tensor(&[h, wd], seed);
        let w = random_tensor(&[f_out, k, k], seed ^ 1);
        let b = random_tensor(&[f_out], seed ^ 2);
        let (y, _) = conv2d_forward(&x, &w, &b, Activation::Relu);
        prop_assert_eq!(y.shape(), &[h, wd, f_out]);
        let (p, _) = maxpool2d_forward(&y, 2, 2);
        prop_assert_eq!(p.shape(), &[h / 2, wd / 2, f_out]);
    }

    /// Pool outputs are existing inputs: each pooled value is the max of
    /// its window.
    #[test]
    fn pooled_values_are_window_maxima(
        t_len in 2usize..16,
        f in 1usize..4,
        pool in 1usize..4,
        seed in any::<u64>(),
    ) {
        prop_assume!(t_len >= pool);
        let x = random_tensor(&[t_len, f], seed);
        let (y, _) = maxpool1d_forward(&x, pool);
        for ot in 0..y.shape()[0] {
            for c in 0..f {
                let window: Vec<f64> = (0..pool)
                    .map(|d| x.data()[(ot * pool + d) * f + c])
                    .collect();
                let best = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(y.data()[ot * f + c], best);
            }
        }
    }
}
