mod common;

use proptest::prelude::*;
use tableqna::dict_tagger::{BaselineMode, BaselineTagger, RejectionReason};
use tableqna::lexicon::{SuperlativeLexicon, TypeDictionary};
use tableqna::query::{Intent, Query};
use tableqna::text::{cont, fold, singularize, tokenize};
use tableqna::Error;

const WORDS: &[&str] = &[
    "cities", "city", "rivers", "river", "largest", "best", "in", "of", "near", "with", "texas", "idaho", "tom", "cruise", "movies",
    "films", "film", "melissa", "smoky", "mountains", "schools", "crime", "2017", "top", "10", "lakes", "towns", "restaurants",
];

fn arb_query() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(WORDS), 1..7).prop_map(|w| w.join(" "))
}

fn arb_tokens(max: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(proptest::sample::select(WORDS).prop_map(String::from), 0..max)
}

proptest! {
    #[test]
    fn tokenize_is_idempotent(raw in "[ A-Za-z0-9,.'!?-]{0,40}") {
        let once = tokenize(&raw);
        prop_assert_eq!(tokenize(&once.join(" ")), once.clone());
        prop_assert!(once.iter().all(|t| !t.is_empty() && t.chars().all(char::is_alphanumeric)));
    }

    #[test]
    fn singularize_is_idempotent(tok in "[a-z]{1,10}") {
        let s = singularize(&tok);
        prop_assert_eq!(singularize(&s), s);
    }

    #[test]
    fn cont_is_reflexive_and_monotone(s in arb_tokens(8), extra in arb_tokens(4), keep in proptest::collection::vec(any::<bool>(), 8)) {
        if !s.is_empty() {
            prop_assert!(cont(&s, &s).unwrap());
        }
        let t: Vec<String> = s.iter().zip(&keep).filter(|(_, k)| **k).map(|(x, _)| x.clone()).collect();
        if !t.is_empty() {
            prop_assert!(cont(&s, &t).unwrap());
            let longer: Vec<String> = extra.iter().chain(&s).chain(&extra).cloned().collect();
            prop_assert!(cont(&longer, &t).unwrap());
        }
    }

    #[test]
    fn cont_matches_naive_subsequence(s in arb_tokens(8), t in arb_tokens(4)) {
        prop_assume!(!t.is_empty());
        prop_assert_eq!(cont(&s, &t).unwrap(), common::naive_subsequence(&fold(&s), &fold(&t)));
    }

    #[test]
    fn baseline_outputs_are_nested(text in arb_query()) {
        let tagger = BaselineTagger::bundled();
        let q = Query::new(text);
        let tdl = tagger.tag(BaselineMode::Tdl, &q);
        let er = tagger.tag(BaselineMode::TdlEr, &q);
        let dp = tagger.tag(BaselineMode::TdlErDp, &q);
        if dp.tagged.is_some() {
            prop_assert_eq!(&dp.tagged, &er.tagged);
        }
        if er.tagged.is_some() {
            prop_assert_eq!(&er.tagged, &tdl.tagged);
        }
        for out in [&tdl, &er, &dp] {
            prop_assert_eq!(out.tagged.is_some(), out.reason == RejectionReason::None);
        }
        if tdl.tagged.is_none() {
            prop_assert_eq!(er.reason, RejectionReason::NoDictHit);
            prop_assert_eq!(dp.reason, RejectionReason::NoDictHit);
        }
    }

    #[test]
    fn accepted_span_is_a_dictionary_name(text in arb_query()) {
        let tagger = BaselineTagger::bundled();
        let q = Query::new(text);
        if let Some(tq) = tagger.tag(BaselineMode::Tdl, &q).tagged {
            let pst = tq.pst_tokens();
            let names = tagger.types.names_of(tq.set_type()).unwrap();
            let (head, last) = pst.split_at(pst.len() - 1);
            let matched = names.iter().any(|n| {
                let toks: Vec<&str> = n.split(' ').collect();
                let (nh, nl) = toks.split_at(toks.len() - 1);
                nh == head && singularize(&last[0]) == nl[0]
            });
            prop_assert!(matched, "{:?} not a name of {}", tq.pst(), tq.set_type());
            let plural = singularize(&last[0]) != last[0];
            match tq.intent() {
                Intent::List => prop_assert!(plural),
                Intent::Superlative => {
                    let sl = SuperlativeLexicon::bundled();
                    prop_assert!(tq.premod().iter().any(|t| sl.contains(t)));
                }
            }
            let rebuilt: Vec<String> = tq.premod().iter().chain(pst).chain(tq.postmod()).cloned().collect();
            prop_assert_eq!(rebuilt.as_slice(), tq.toks());
            prop_assert_eq!(tq.confidence(), 1.0);
        }
    }
}

#[test]
fn cont_examples() {
    let s = tokenize("Tom Cruise Movies (film list)");
    assert!(cont(&s, &["movie"]).unwrap());
    assert!(cont(&s, &["tom", "films"]).unwrap());
    assert!(!cont(&s, &["movies", "tom"]).unwrap());
    assert!(matches!(cont(&s, &[] as &[&str]), Err(Error::Contract(_))));
}

#[test]
fn baseline_worked_examples() {
    let tagger = BaselineTagger::bundled();
    let tag = |mode, text: &str| tagger.tag(mode, &Query::new(text));
    let list = tag(BaselineMode::TdlErDp, "cities in texas").tagged.unwrap();
    assert_eq!((list.pst().as_str(), list.set_type().as_str(), list.intent()), ("cities", "city", Intent::List));
    let sup = tag(BaselineMode::TdlErDp, "largest city in california").tagged.unwrap();
    assert_eq!((sup.pst().as_str(), sup.intent()), ("city", Intent::Superlative));
    assert!(tag(BaselineMode::Tdl, "melissa rivers").tagged.is_some());
    assert_eq!(tag(BaselineMode::TdlEr, "melissa rivers").reason, RejectionReason::EntityName);
    assert_eq!(tag(BaselineMode::TdlErDp, "crime in cities").reason, RejectionReason::NotRoot);
    assert_eq!(tag(BaselineMode::Tdl, "michael phelps").reason, RejectionReason::NoDictHit);
    assert_eq!(tag(BaselineMode::Tdl, "").reason, RejectionReason::NoDictHit);
}

#[test]
fn duplicate_name_across_types_fails_at_load() {
    let err = TypeDictionary::parse("city\tcity|town\nsettlement\ttown\n", "types").unwrap_err();
    assert!(matches!(err, Error::AmbiguousName { .. }), "{err:?}");
    assert!(TypeDictionary::parse("city\tcity|city\n", "types").is_ok());
    assert!(TypeDictionary::parse("city\n", "types").is_err());
    assert!(TypeDictionary::parse("city\t |x\n", "types").is_err());
}

#[test]
fn bundled_dictionary_has_no_shared_names() {
    let td = TypeDictionary::bundled();
    let mut seen = std::collections::BTreeMap::new();
    for n in td.names() {
        let key = n.tokens.join(" ");
        if let Some(prev) = seen.insert(key.clone(), n.type_id.clone()) {
            assert_eq!(prev, n.type_id, "{key}");
        }
    }
    assert!(td.len() >= 5);
}
