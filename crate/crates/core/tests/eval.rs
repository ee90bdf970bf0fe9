mod common;

use common::fixtures;
use proptest::prelude::*;
use tableqna::eval::{
    feature_group_or, feature_report, parse_tagging_gold, format_feature_report, information_gain, phi_coefficient, pr_curve, pr_curve_csv, roc_auc,
    selection_metrics, tagging_metrics, ContingencyCounts, GoldTag, PairLabels, ScoredQuery, ZeroMarginal,
};
use tableqna::features::FEATURE_NAMES;
use tableqna::lexicon::TypeId;
use tableqna::query::{Intent, Query, Span, TaggedQuery};

fn arb_pairs() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (1usize..60).prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0), Just(2.5), -1.0f64..3.0], n),
            proptest::collection::vec(any::<bool>(), n),
        )
    })
}

fn counts(f: &[bool], y: &[bool]) -> ContingencyCounts {
    ContingencyCounts::from_pairs(f.iter().copied().zip(y.iter().copied()))
}

fn brute_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                wins += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

proptest! {
    #[test]
    fn phi_is_bounded_and_antisymmetric(f in proptest::collection::vec(any::<bool>(), 1..50), y in proptest::collection::vec(any::<bool>(), 50)) {
        let y = &y[..f.len()];
        if let Ok(phi) = phi_coefficient(&counts(&f, y)) {
            prop_assert!((-1.0..=1.0).contains(&phi));
            let flipped: Vec<bool> = y.iter().map(|b| !b).collect();
            let other = phi_coefficient(&counts(&f, &flipped)).unwrap();
            prop_assert!((phi + other).abs() < 1e-12);
            let self_phi = phi_coefficient(&counts(y, y)).unwrap();
            prop_assert!((self_phi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn information_gain_is_nonnegative_and_polarity_free((values, labels) in arb_pairs()) {
        let ig = information_gain(&values, &labels).unwrap();
        prop_assert!(ig >= 0.0);
        prop_assert!(ig <= 1.0 + 1e-12);
        let flipped: Vec<bool> = labels.iter().map(|b| !b).collect();
        prop_assert!((information_gain(&values, &flipped).unwrap() - ig).abs() < 1e-12);
        let negated: Vec<f64> = values.iter().map(|&v| if v > 0.0 { 0.0 } else { 1.0 }).collect();
        prop_assert!((information_gain(&negated, &labels).unwrap() - ig).abs() < 1e-12);
    }

    #[test]
    fn auc_matches_pair_counting((scores, labels) in arb_pairs()) {
        match (roc_auc(&scores, &labels), brute_auc(&scores, &labels)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn pr_curve_agrees_with_per_threshold_selection(
        scores in proptest::collection::vec(proptest::collection::vec((0.0f64..1.0, 1u32..3, any::<bool>()), 0..4), 1..12),
        thetas in proptest::collection::vec(0.0f64..1.0, 1..6),
    ) {
        let mut gold = PairLabels::default();
        let scored: Vec<ScoredQuery> = scores
            .iter()
            .enumerate()
            .map(|(qi, cands)| {
                let query = format!("q{qi}");
                let candidates = cands
                    .iter()
                    .enumerate()
                    .map(|(ti, &(s, rank, good))| {
                        let r = format!("d{qi}#{ti}");
                        gold.insert(&query, &r, good);
                        (r, s, rank)
                    })
                    .collect();
                ScoredQuery { query, candidates }
            })
            .collect();
        let curve = pr_curve(&scored, &gold, &thetas).unwrap();
        for point in &curve {
            let results: Vec<(String, Option<String>)> =
                scored.iter().map(|sq| (sq.query.clone(), sq.returned(point.theta).map(String::from))).collect();
            prop_assert_eq!(point.metrics, selection_metrics(&results, &gold).unwrap());
            for p in [point.metrics.precision, point.metrics.recall].into_iter().flatten() {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
        prop_assert_eq!(pr_curve_csv(&curve).lines().count(), thetas.len() + 1);
    }

    #[test]
    fn tagging_metrics_are_fractions(outcomes in proptest::collection::vec((any::<bool>(), 0u8..3), 1..40)) {
        let q = Query::new("cities in texas");
        let pred_right = TaggedQuery::new(q.clone(), Intent::List, Span::new(0, 1), TypeId::new("city"), 1.0).unwrap();
        let pred_wrong = TaggedQuery::new(q, Intent::List, Span::new(2, 3), TypeId::new("city"), 1.0).unwrap();
        let gold = GoldTag { span: Span::new(0, 1), set_type: TypeId::new("city") };
        let rows: Vec<(Option<&TaggedQuery>, Option<&GoldTag>)> = outcomes
            .iter()
            .map(|&(positive, p)| {
                let pred = match p { 0 => None, 1 => Some(&pred_right), _ => Some(&pred_wrong) };
                (pred, positive.then_some(&gold))
            })
            .collect();
        let m = tagging_metrics(&rows, rows.len()).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.coverage));
        if let Some(p) = m.precision {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        let tp = outcomes.iter().filter(|&&(pos, p)| pos && p == 1).count();
        prop_assert_eq!(m.tp, tp);
        prop_assert_eq!(m.tp + m.fp, outcomes.iter().filter(|o| o.1 != 0).count());
    }
}

#[test]
fn phi_reports_the_empty_margin() {
    let c = ContingencyCounts { n11: 3, n10: 0, n01: 2, n00: 0 };
    assert_eq!(phi_coefficient(&c), Err(ZeroMarginal::FeatureNegative));
    let c = ContingencyCounts { n11: 0, n10: 0, n01: 2, n00: 5 };
    assert_eq!(phi_coefficient(&c), Err(ZeroMarginal::LabelPositive));
}

#[test]
fn contract_violations() {
    assert!(information_gain(&[], &[]).is_err());
    assert!(information_gain(&[1.0], &[true, false]).is_err());
    assert!(tagging_metrics(&[], 0).is_err());
    assert!(feature_group_or(&[]).is_err());
    assert!(feature_group_or(&[vec![true], vec![true, false]]).is_err());
    let mut gold = PairLabels::default();
    gold.insert("q", "a#0", true);
    assert!(selection_metrics(&[("q".into(), Some("b#0".into()))], &gold).is_err());
}

#[test]
fn feature_report_covers_features_and_groups() {
    let records = fixtures::labeled_records("selector_labels.tsv");
    let stats = feature_report(&records).unwrap();
    assert_eq!(stats.len(), FEATURE_NAMES.len() + 2);
    for (s, name) in stats.iter().zip(FEATURE_NAMES) {
        assert_eq!(s.name, name);
    }
    assert_eq!(stats[FEATURE_NAMES.len()].name, "group:table_search_text");
    for s in &stats {
        assert!(s.information_gain >= 0.0);
        assert_eq!(s.phi.is_none(), s.phi_undefined.is_some(), "{}", s.name);
    }
    let text = format_feature_report(&stats);
    assert_eq!(text.lines().count(), stats.len() + 1);
    let unlabelled: Vec<_> = records.into_iter().map(|mut r| {
        r.label = None;
        r
    }).collect();
    assert!(feature_report(&unlabelled).is_err());
}

#[test]
fn gold_and_label_files_parse() {
    let rows = parse_tagging_gold("# c\ncities in texas\tcities\tcity\tclean\nmichael phelps\t-\t-\n", "gold").unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].gold, Some(GoldTag { span: Span::new(0, 1), set_type: TypeId::new("city") }));
    assert_eq!((rows[1].gold.as_ref(), rows[1].category.as_str()), (None, ""));
    assert!(parse_tagging_gold("cities in texas\ttowns\ttown\n", "gold").is_err());
    assert!(parse_tagging_gold("cities in texas\tcities\t-\n", "gold").is_err());
    let gold = fixtures::tagging_gold();
    assert_eq!(gold.len(), 200);

    let labels = PairLabels::parse("Tom Cruise Movies\ta#0\t1\nx\tb#1\t0\n", "labels").unwrap();
    assert_eq!(labels.get("tom cruise movies", "a#0"), Some(true));
    assert_eq!(labels.len(), 2);
    assert!(PairLabels::parse("x\tb#1\tyes\n", "labels").is_err());
    assert!(PairLabels::parse("x\n", "labels").is_err());
    let film = PairLabels::load(fixtures::path("film_pair_labels.tsv")).unwrap();
    assert_eq!(film.get("tom cruise movies", "tom-cruise-movies#0"), Some(true));
    assert_eq!(film.get("tom cruise movies", "tom-cruise-movies#1"), Some(false));
}
