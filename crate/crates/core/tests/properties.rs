mod common;

use indictox::calibrate::{self, CalibrationSteps, Confusion};
use indictox::data_model::{self, CorpusRole, Language, ProbabilityColumn};
use indictox::ensemble::{self, EnsembleSpec, ThresholdTable};
use indictox::features;
use indictox::gbdt::{self, split_gain, GbdtParams};
use proptest::prelude::*;

fn column(id: &str, values: Vec<f64>) -> ProbabilityColumn {
    let ids = (0..values.len()).map(|i| format!("r{i}")).collect();
    ProbabilityColumn::new(id, ids, values).unwrap()
}

fn probs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ensemble_stays_in_member_hull(
        (a, b, c) in (1usize..40).prop_flat_map(|n| (probs(n), probs(n), probs(n))),
        w in prop::collection::vec(0.01f64..5.0, 3),
    ) {
        let cols = vec![column("a", a.clone()), column("b", b.clone()), column("c", c.clone())];
        let spec = EnsembleSpec::new(
            vec![("a".into(), w[0]), ("b".into(), w[1]), ("c".into(), w[2])],
            true,
        ).unwrap();
        let out = ensemble::average_ensemble(&cols, &spec).unwrap();
        for (i, &p) in out.values().iter().enumerate() {
            let lo = a[i].min(b[i]).min(c[i]);
            let hi = a[i].max(b[i]).max(c[i]);
            prop_assert!(lo <= p && p <= hi, "row {i}: {p} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn ensemble_of_identical_members_is_identity(p in probs(30), w in 0.1f64..3.0) {
        let cols = vec![column("x", p.clone()), column("y", p.clone())];
        let spec = EnsembleSpec::new(vec![("x".into(), w), ("y".into(), 1.0)], true).unwrap();
        let out = ensemble::average_ensemble(&cols, &spec).unwrap();
        prop_assert_eq!(out.values(), &p[..]);
    }

    #[test]
    fn fusion_is_between_inputs(a in probs(20), b in probs(20), w in 0.0f64..=1.0) {
        let fused = ensemble::fuse_translit(&column("m", a.clone()), &column("m", b.clone()), w).unwrap();
        for (i, &p) in fused.values().iter().enumerate() {
            prop_assert!(a[i].min(b[i]) <= p && p <= a[i].max(b[i]));
        }
    }

    #[test]
    fn nudge_flips_exactly_the_band_below_threshold(
        p in probs(60),
        t in 0.05f64..0.95,
        delta in 0.0f64..0.2,
    ) {
        let langs = vec![Language::Hindi; p.len()];
        let table = ThresholdTable::global_only(t).unwrap();
        let col = column("e", p.clone());
        let before = ensemble::apply_threshold(&col, &langs, &table).unwrap();
        let after = ensemble::apply_threshold(&ensemble::nudge(&col, delta).unwrap(), &langs, &table).unwrap();
        for i in 0..p.len() {
            let shifted = (p[i] + delta).min(1.0);
            let expect_flip = p[i] < t && shifted >= t;
            prop_assert_eq!(after[i] != before[i], expect_flip, "row {} p={}", i, p[i]);
            prop_assert!(after[i] >= before[i]);
        }
    }

    #[test]
    fn thresholding_commutes_with_increasing_maps(p in probs(50), t in 0.01f64..0.99) {
        // strictly increasing up to rounding
        let f = |x: f64| x * 0.25 + 0.125;
        let langs = vec![Language::Tamil; p.len()];
        let direct = ensemble::apply_threshold(
            &column("e", p.clone()), &langs, &ThresholdTable::global_only(t).unwrap()).unwrap();
        let mapped = ensemble::apply_threshold(
            &column("e", p.iter().map(|&x| f(x)).collect()),
            &langs,
            &ThresholdTable::global_only(f(t)).unwrap(),
        ).unwrap();
        for i in 0..p.len() {
            // the affine map may collapse values within one ulp of t; skip those
            if (p[i] - t).abs() > 1e-12 {
                prop_assert_eq!(direct[i], mapped[i]);
            }
        }
    }

    #[test]
    fn mean_f1_is_symmetric_in_classes_and_rows(
        pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200),
        seed in any::<u64>(),
    ) {
        let (preds, labels): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let base = calibrate::mean_f1(&preds, &labels).unwrap().mean_f1();

        let flip = |v: &[u8]| v.iter().map(|&x| 1 - x).collect::<Vec<u8>>();
        let swapped = calibrate::mean_f1(&flip(&preds), &flip(&labels)).unwrap().mean_f1();
        prop_assert!((base - swapped).abs() < 1e-12);

        let mut order: Vec<usize> = (0..preds.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut common::rng(seed));
        let pp: Vec<u8> = order.iter().map(|&i| preds[i]).collect();
        let ll: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
        prop_assert_eq!(calibrate::mean_f1(&pp, &ll).unwrap().mean_f1(), base);

        prop_assert!((base - common::macro_f1(&preds, &labels).0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn exact_comparison_agrees_with_fractions(
        a in prop::collection::vec((0u8..2, 0u8..2), 1..60),
        b in prop::collection::vec((0u8..2, 0u8..2), 1..60),
    ) {
        let (pa, la): (Vec<u8>, Vec<u8>) = a.into_iter().unzip();
        let (pb, lb): (Vec<u8>, Vec<u8>) = b.into_iter().unzip();
        let (n1, d1) = common::macro_f1_exact(&pa, &la);
        let (n2, d2) = common::macro_f1_exact(&pb, &lb);
        let expect = (n1 * d2).cmp(&(n2 * d1));
        let got = Confusion::from_pairs(&pa, &la).cmp_mean_f1(&Confusion::from_pairs(&pb, &lb));
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn calibrated_thresholds_never_lose_to_one_half(seed in any::<u64>(), n in 20usize..150) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let corpus = common::random_corpus(&mut rng, n, CorpusRole::Train);
        let labels = corpus.labels().unwrap();
        let p: Vec<f64> = labels
            .iter()
            .map(|&y| (rng.random::<f64>() * 0.7 + 0.3 * y as f64).min(1.0))
            .collect();
        let col = ProbabilityColumn::for_corpus("e", &corpus, p).unwrap();
        let table = calibrate::calibrate_thresholds(&col, &corpus, &CalibrationSteps::default()).unwrap();
        let langs = corpus.languages();
        let tuned = ensemble::apply_threshold(&col, &langs, &table).unwrap();
        let half = ensemble::apply_threshold(&col, &langs, &ThresholdTable::global_only(0.5).unwrap()).unwrap();
        for lang in Language::ALL {
            let idx: Vec<usize> = (0..n).filter(|&i| langs[i] == lang).collect();
            if idx.is_empty() {
                continue;
            }
            let pick = |v: &[u8]| idx.iter().map(|&i| v[i]).collect::<Vec<u8>>();
            let y = pick(&labels);
            let c_tuned = Confusion::from_pairs(&pick(&tuned), &y);
            let c_half = Confusion::from_pairs(&pick(&half), &y);
            prop_assert!(c_tuned.cmp_mean_f1(&c_half).is_ge(), "{lang}");
        }
    }

    #[test]
    fn split_gain_is_symmetric(
        gl in -50.0f64..50.0, hl in 0.0f64..50.0,
        gr in -50.0f64..50.0, hr in 0.0f64..50.0,
        lambda in 0.0f64..10.0,
    ) {
        prop_assume!(hl + hr + lambda > 1e-6);
        prop_assert_eq!(split_gain(gl, hl, gr, hr, lambda), split_gain(gr, hr, gl, hl, lambda));
        prop_assert_eq!(split_gain(gl, hl, gr, hr, lambda), split_gain(-gl, hl, -gr, hr, lambda));
    }

    #[test]
    fn round_trip_corpus_csv(seed in any::<u64>(), n in 0usize..40, train in any::<bool>()) {
        let role = if train { CorpusRole::Train } else { CorpusRole::Test };
        let corpus = common::random_corpus(&mut common::rng(seed), n, role);
        let mut buf = Vec::new();
        data_model::write_corpus_to(&corpus, &mut buf, "mem".as_ref()).unwrap();
        let back = data_model::read_corpus_from(&buf[..], "mem".as_ref(), role).unwrap();
        prop_assert_eq!(back.records(), corpus.records());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn features_commute_with_row_permutation(seed in any::<u64>(), n in 1usize..60) {
        use rand::{seq::SliceRandom, Rng};
        let mut rng = common::rng(seed);
        let corpus = common::random_corpus(&mut rng, n, CorpusRole::Test);
        let p: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let col = ProbabilityColumn::for_corpus("e", &corpus, p.clone()).unwrap();
        let feats = features::build_features(&corpus, &col).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let shuffled = corpus.select(&order).unwrap();
        let pcol = ProbabilityColumn::for_corpus("e", &shuffled, order.iter().map(|&i| p[i]).collect()).unwrap();
        let pfeats = features::build_features(&shuffled, &pcol).unwrap();
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(&pfeats[k], &feats[i]);
        }
    }

    #[test]
    fn duplicating_a_row_keeps_group_max(seed in any::<u64>(), n in 1usize..30) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let corpus = common::random_corpus(&mut rng, n, CorpusRole::Test);
        let mut records = corpus.records().to_vec();
        let mut dup = records[rng.random_range(0..n)].clone();
        dup.comment_id.push_str("_dup");
        records.push(dup.clone());
        let bigger = data_model::Corpus::new(records, CorpusRole::Test).unwrap();
        let f0 = features::build_features(&corpus, &ProbabilityColumn::for_corpus("e", &corpus, vec![0.5; n]).unwrap()).unwrap();
        let f1 = features::build_features(&bigger, &ProbabilityColumn::for_corpus("e", &bigger, vec![0.5; n + 1]).unwrap()).unwrap();
        for (a, b) in f0.iter().zip(&f1) {
            prop_assert_eq!(a.max_report_post, b.max_report_post);
            prop_assert_eq!(a.max_like_post, b.max_like_post);
            prop_assert_eq!(a.max_report_comment, b.max_report_comment);
            prop_assert_eq!(a.max_like_comment, b.max_like_comment);
        }
    }

    #[test]
    fn stacker_is_invariant_to_power_of_two_feature_scaling(seed in any::<u64>(), n in 10usize..80) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.random_range(0..20) as f64 / 4.0).collect())
            .collect();
        let labels: Vec<u8> = rows.iter().map(|r| u8::from(r[0] + rng.random::<f64>() * 3.0 > 3.5)).collect();
        prop_assume!(labels.contains(&0) && labels.contains(&1));
        let params = GbdtParams { n_trees: 10, max_depth: 3, ..GbdtParams::default() };
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x * 8.0).collect()).collect();
        let a = gbdt::gbdt_predict(&gbdt::gbdt_fit(&rows, &labels, &params).unwrap(), &rows).unwrap();
        let b = gbdt::gbdt_predict(&gbdt::gbdt_fit(&scaled, &labels, &params).unwrap(), &scaled).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn blend_is_between_stackers(a in probs(25), b in probs(25), w in 0.0f64..=1.0) {
        let out = gbdt::blend(&a, &b, w).unwrap();
        for i in 0..a.len() {
            prop_assert!(a[i].min(b[i]) <= out[i] && out[i] <= a[i].max(b[i]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn baseline_scores_do_not_depend_on_row_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let corpus = data_model::generate_synthetic_corpus(300, seed, &Language::default_weights()).unwrap();
        let params = indictox::baseline::BaselineParams { hash_bits: 12, epochs: 2, ..Default::default() };
        let (model, _) = indictox::baseline::train_baseline(&corpus, &params).unwrap();
        let full = indictox::baseline::score_baseline(&model, &corpus, "m").unwrap();
        let mut order: Vec<usize> = (0..corpus.len()).collect();
        order.shuffle(&mut common::rng(seed ^ 1));
        let sub = corpus.select(&order).unwrap();
        let part = indictox::baseline::score_baseline(&model, &sub, "m").unwrap();
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(part.values()[k], full.values()[i]);
        }
    }

    #[test]
    fn generator_is_a_function_of_its_seed(seed in any::<u64>(), n in 1usize..200) {
        let w = Language::default_weights();
        let a = data_model::generate_synthetic_corpus(n, seed, &w).unwrap();
        let b = data_model::generate_synthetic_corpus(n, seed, &w).unwrap();
        prop_assert_eq!(a.records(), b.records());
        prop_assert_eq!(a.len(), n);
    }
}
