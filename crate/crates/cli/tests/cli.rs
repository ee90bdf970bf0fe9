use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tableqna::features::{featurize, read_features_jsonl, IdfTable};
use tableqna::query::TaggedQuery;
use tableqna::select::{pick_best, SelectorModel};
use tableqna::table::{candidate_pool, read_tables_jsonl, DistinctNonNumeric, ExtractConfig, LocalCorpus};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tableqna"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let fx = fixtures();
    let mut full = vec!["--corpus", fx.to_str().unwrap()];
    full.extend_from_slice(args);
    run_in(Path::new(env!("CARGO_MANIFEST_DIR")), &full)
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

#[test]
fn tag_superlative_with_dictionary_lookup() {
    let v = json(&run_in(Path::new("/"), &["tag", "--query", "largest city in california", "--mode", "tdl"]));
    assert_eq!(v["pst"], "city");
    assert_eq!(v["set_type"], "city");
    assert_eq!(v["intent"], "Superlative");
    assert_eq!(v["confidence"], 1.0);
}

#[test]
fn tag_explain_reports_the_rejection() {
    let v = json(&run(&["tag", "--query", "joan rivers net worth", "--mode", "tdl-er", "--explain"]));
    assert_eq!(v["tagged"], Value::Null);
    assert_eq!(v["reason"], "entity_name");
}

#[test]
fn neural_tagger_abstains_on_a_person_query() {
    let out = run_in(&fixtures(), &["tag", "--query", "michael phelps", "--mode", "dnn"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "null");
}

#[test]
fn answer_returns_the_film_table() {
    let v = json(&run(&["answer", "--query", "tom cruise movies", "--k", "5", "--theta", "0.8"]));
    assert_eq!(v["answer_table_ref"], "tom-cruise-movies#0");
    assert_eq!(v["threshold"], 0.8);
    assert!(v["score"].as_f64().unwrap() > 0.8);
    let none = json(&run(&["answer", "--query", "michael phelps"]));
    assert_eq!(none["answer_table_ref"], Value::Null);
}

#[test]
fn answer_equals_the_composed_stages() {
    let query = "tom cruise movies";
    let answer = json(&run(&["answer", "--query", query]));
    let tq: TaggedQuery = serde_json::from_str(&stdout(&run(&["tag", "--query", query]))).unwrap();

    let fx = fixtures();
    let dumped = read_tables_jsonl(stdout(&run(&["extract"])).as_bytes()).unwrap();
    let corpus = LocalCorpus::open(fx.join("corpus"), fx.join("ranking.tsv")).unwrap();
    let pool = candidate_pool(&tq, &corpus, 5, &ExtractConfig::default(), &DistinctNonNumeric).unwrap();
    let idf = IdfTable::load(fx.join("idf.tsv")).unwrap();
    assert_eq!(IdfTable::from_tables(&dumped).format(), idf.format());

    let records = read_features_jsonl(stdout(&run(&["featurize", "--query", query])).as_bytes(), "stdout").unwrap();
    assert_eq!(records.len(), pool.tables.len());
    let model = SelectorModel::<f64>::load(fx.join("selector.json")).unwrap();
    let mut scores = Vec::new();
    for (rec, t) in records.iter().zip(&pool.tables) {
        assert_eq!(rec.table_ref, t.reference());
        let mut from_dump = dumped.iter().find(|d| d.reference() == t.reference()).unwrap().clone();
        from_dump.doc.sr_rank = t.doc.sr_rank;
        let fv = featurize::<f64>(&tq, &from_dump, &idf);
        assert_eq!(rec.vector::<f64>().unwrap().values(), fv.values());
        scores.push(model.score(&fv).unwrap());
    }
    let ranks: Vec<u32> = pool.tables.iter().map(|t| t.doc.sr_rank).collect();
    let best = pick_best(&scores, &ranks, 0.5).unwrap();
    assert_eq!(answer["answer_table_ref"], pool.tables[best].reference());
    assert_eq!(answer["score"].as_f64().unwrap().to_bits(), scores[best].to_bits());
}

#[test]
fn bundled_artifacts_are_reproducible() {
    let fx = fixtures();
    let read = |name: &str| std::fs::read_to_string(fx.join(name)).unwrap();
    let train = stdout(&run(&["gen-train"]));
    assert_eq!(train, read("train.tsv"));
    assert_eq!(stdout(&run(&["extract"])), read("tables.jsonl"));
    let labels = fx.join("selector_labels.tsv");
    let features = stdout(&run(&["--mode", "tdl-er-dp", "featurize", "--labels", labels.to_str().unwrap()]));
    assert_eq!(features, read("features.jsonl"));
    let selector = stdout(&run(&["train-selector", "--features", fx.join("features.jsonl").to_str().unwrap()]));
    assert_eq!(selector, read("selector.json"));
    let tagger = stdout(&run(&["train-tagger", "--train", fx.join("train.tsv").to_str().unwrap()]));
    assert_eq!(tagger, read("tagger.json"));
}

#[test]
fn runs_are_bit_identical() {
    let fx = fixtures();
    let features = fx.join("features.jsonl");
    let a = stdout(&run(&["--seed", "11", "--set", "rounds=20", "train-selector", "--features", features.to_str().unwrap()]));
    let b = stdout(&run(&["--seed", "11", "--set", "rounds=20", "train-selector", "--features", features.to_str().unwrap()]));
    assert_eq!(a, b);
    let model: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(model["trees"].as_array().unwrap().len(), 20);
    let q = ["answer", "--query", "2017 tom cruise movies"];
    assert_eq!(stdout(&run(&q)), stdout(&run(&q)));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snippet.json");
    let out = run(&[
        "snippet",
        "--query",
        "2017 tom cruise movies",
        "--table",
        "tom-cruise-movies#0",
        "--m",
        "2",
        "--n",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][0][0], "2017");
    assert_eq!(v["columns"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn evaluation_subcommands() {
    let fx = fixtures();
    let gold = fx.join("tagging_gold.tsv");
    let tdl = json(&run(&["--mode", "tdl", "eval-tagger", "--gold", gold.to_str().unwrap()]));
    assert_eq!((tdl["tp"].as_u64(), tdl["fp"].as_u64(), tdl["n"].as_u64()), (Some(92), Some(70), Some(200)));
    let dp = json(&run(&["--mode", "tdl-er-dp", "eval-tagger", "--gold", gold.to_str().unwrap()]));
    assert!(dp["precision"].as_f64() > tdl["precision"].as_f64());

    let labels = fx.join("selector_labels.tsv");
    let csv = stdout(&run(&["eval-selector", "--labels", labels.to_str().unwrap(), "--thetas", "0.2,0.8", "--csv"]));
    assert_eq!(csv.lines().next(), Some("theta,precision,recall"));
    assert_eq!(csv.lines().count(), 3);
    let points = json(&run(&["eval-selector", "--labels", labels.to_str().unwrap()]));
    assert_eq!(points.as_array().unwrap().len(), 19);

    let features = fx.join("features.jsonl");
    let report = stdout(&run(&["feature-report", "--features", features.to_str().unwrap()]));
    assert!(report.lines().any(|l| l.starts_with("SubjectColName_SET_Match")));
    let as_json = json(&run(&["feature-report", "--features", features.to_str().unwrap(), "--json"]));
    assert_eq!(as_json.as_array().unwrap().len(), 25);
}

#[test]
fn exit_codes_follow_error_kind() {
    let missing = run(&["train-tagger", "--train", "no-such-file.tsv"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("no-such-file.tsv"));
    assert_eq!(run(&["--theta", "1.5", "answer", "--query", "x"]).status.code(), Some(2));
    assert_eq!(run(&["--set", "colour=red", "answer", "--query", "x"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let one_class = dir.path().join("one.jsonl");
    let line = stdout(&run(&["featurize", "--query", "tom cruise movies"])).lines().next().unwrap().to_string();
    let labelled = line.replacen("{", "{\"label\":1,", 1);
    std::fs::write(&one_class, format!("{labelled}\n{labelled}\n")).unwrap();
    let data_err = run(&["train-selector", "--features", one_class.to_str().unwrap()]);
    assert_eq!(data_err.status.code(), Some(1), "{}", String::from_utf8_lossy(&data_err.stderr));
    let contract = run(&["snippet", "--query", "tom cruise movies", "--table", "no-such#0"]);
    assert_eq!(contract.status.code(), Some(1));
}
