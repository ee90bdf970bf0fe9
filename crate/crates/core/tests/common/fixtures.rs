//! Loaders for the bundled files under `fixtures/`.

use std::path::PathBuf;

use tableqna::dict_tagger::BaselineTagger;
use tableqna::lexicon::{TypeDictionary, TypeId};
use tableqna::neural::{EmbeddingTable, LabeledSequence, TagSet, TrainedTagger, TrainingConfig};
use tableqna::query::{Query, Span};
use tableqna::table::LocalCorpus;
use tableqna::training_data::{generate, load_query_log, GenerationConfig, Mix};

pub const FIXTURE_TYPES: [&str; 5] = ["city", "film", "river", "school", "mountain"];

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(name: &str) -> PathBuf {
    dir().join(name)
}

pub fn corpus() -> LocalCorpus {
    LocalCorpus::open(path("corpus"), path("ranking.tsv")).unwrap()
}

pub type GoldRow = tableqna::eval::GoldQuery;

pub fn tagging_gold() -> Vec<GoldRow> {
    tableqna::eval::load_tagging_gold(path("tagging_gold.tsv")).unwrap()
}

pub fn fixture_tags() -> TagSet {
    let td = TypeDictionary::bundled().subset(FIXTURE_TYPES).unwrap();
    TagSet::from_dictionary(&td)
}

pub fn embeddings() -> EmbeddingTable<f64> {
    EmbeddingTable::load(path("embeddings.txt")).unwrap()
}

pub fn generated_examples(mix: Mix) -> Vec<LabeledSequence> {
    let log = load_query_log(path("query_log.tsv")).unwrap();
    let cfg = GenerationConfig {
        mix,
        ..GenerationConfig::default()
    };
    generate(&log, &BaselineTagger::bundled(), &cfg)
        .unwrap()
        .into_iter()
        .map(|e| e.sequence)
        .collect()
}

pub fn train_fixture_tagger(examples: &[LabeledSequence]) -> TrainedTagger<f64> {
    tableqna::neural::train(examples, fixture_tags(), embeddings(), &TrainingConfig::default()).unwrap()
}

pub fn lines(name: &str) -> Vec<String> {
    std::fs::read_to_string(path(name))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

pub fn corpus_tables() -> Vec<tableqna::table::WebTable> {
    corpus()
        .all_tables(&tableqna::table::ExtractConfig::default(), &tableqna::table::DistinctNonNumeric)
        .unwrap()
}

pub fn corpus_idf() -> tableqna::features::IdfTable {
    tableqna::features::IdfTable::from_tables(&corpus_tables())
}

/// ⟨movies, film, List⟩ for "tom cruise movies" and its "2017" variant.
pub fn tom_cruise_movies(prefix: &str) -> tableqna::query::TaggedQuery {
    let q = Query::new(format!("{prefix}tom cruise movies"));
    let n = q.len();
    tableqna::query::TaggedQuery::new(q, tableqna::query::Intent::List, Span::new(n - 1, n), TypeId::new("film"), 1.0).unwrap()
}

pub fn table(reference: &str) -> tableqna::table::WebTable {
    corpus_tables()
        .into_iter()
        .find(|t| t.reference() == reference)
        .unwrap_or_else(|| panic!("no table {reference}"))
}

/// Feature records for a labels file, the queries tagged by TDL+ER+DP.
pub fn labeled_records(labels_file: &str) -> Vec<tableqna::features::FeatureRecord> {
    use tableqna::dict_tagger::BaselineMode;
    use tableqna::features::{featurize, FeatureRecord};
    let tables = corpus_tables();
    let idf = tableqna::features::IdfTable::from_tables(&tables);
    let tagger = BaselineTagger::bundled();
    lines(labels_file)
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let tq = tagger
                .tag(BaselineMode::TdlErDp, &Query::new(f[0]))
                .tagged
                .unwrap_or_else(|| panic!("{:?} not tagged", f[0]));
            let t = tables.iter().find(|t| t.reference() == f[1]).unwrap_or_else(|| panic!("no table {}", f[1]));
            FeatureRecord::new::<f64>(f[0], f[1], &featurize(&tq, t, &idf), Some(f[2].parse().unwrap()))
        })
        .collect()
}
