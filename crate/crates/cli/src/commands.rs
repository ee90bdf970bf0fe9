//! One function per subcommand. Each returns the text written to the output.

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;
use tableqna::dict_tagger::{BaselineMode, BaselineTagger, RejectionReason, RootCheckRule};
use tableqna::eval::{
    feature_report, format_feature_report, load_tagging_gold, pr_curve, pr_curve_csv, tagging_metrics, PairLabels, ScoredQuery,
    TaggingMetrics,
};
use tableqna::features::{featurize, read_features_jsonl, write_features_jsonl, FeatureRecord, IdfTable};
use tableqna::lexicon::{EntityNameLexicon, SuperlativeLexicon, TypeDictionary};
use tableqna::neural::{format_sequences, load_sequences, predict_tagged_query, train, EmbeddingTable, TagSet, TaggerModel, TrainingConfig};
use tableqna::query::{Query, TaggedQuery};
use tableqna::select::{select_answer, train_selector, SelectionOutput, SelectorConfig, SelectorModel};
use tableqna::snippet::{generate_snippet, SnippetConfig, SnippetJson};
use tableqna::table::{
    candidate_pool, extract_tables, read_tables_jsonl, write_tables_jsonl, DistinctNonNumeric, DocumentContext, ExtractConfig,
    LocalCorpus, WebTable,
};
use tableqna::training_data::{generate, load_query_log, GenerationConfig};
use tableqna::{Error, Result};

use crate::config::{existing, required, PipelineConfig, TaggerMode};

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn open_file(path: &Path) -> Result<BufReader<std::fs::File>> {
    let f = std::fs::File::open(existing(path)?).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    Ok(BufReader::new(f))
}

pub fn baseline(cfg: &PipelineConfig) -> Result<BaselineTagger> {
    Ok(BaselineTagger {
        types: match &cfg.types {
            Some(p) => TypeDictionary::load(existing(p)?)?,
            None => TypeDictionary::bundled(),
        },
        superlatives: match &cfg.superlatives {
            Some(p) => SuperlativeLexicon::load(existing(p)?)?,
            None => SuperlativeLexicon::bundled(),
        },
        entities: match &cfg.entities {
            Some(p) => EntityNameLexicon::load(existing(p)?)?,
            None => EntityNameLexicon::bundled(),
        },
        rule: RootCheckRule::default(),
    })
}

/// The query tagger selected by `tagger_mode`.
pub enum Tagger {
    Baseline(BaselineTagger, BaselineMode),
    Neural(Box<TaggerModel<f64>>, f64),
}

impl Tagger {
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self> {
        let mode = match cfg.tagger_mode {
            TaggerMode::Tdl => BaselineMode::Tdl,
            TaggerMode::TdlEr => BaselineMode::TdlEr,
            TaggerMode::TdlErDp => BaselineMode::TdlErDp,
            TaggerMode::Dnn => {
                let model = TaggerModel::load(required(&cfg.tagger_model, "tagger_model")?)?;
                return Ok(Tagger::Neural(Box::new(model), cfg.rho));
            }
        };
        Ok(Tagger::Baseline(baseline(cfg)?, mode))
    }

    /// The tagged query, and the rejection reason for dictionary taggers.
    pub fn tag(&self, q: &Query) -> Result<(Option<TaggedQuery>, Option<RejectionReason>)> {
        match self {
            Tagger::Baseline(t, mode) => {
                let out = t.tag(*mode, q);
                Ok((out.tagged, Some(out.reason)))
            }
            Tagger::Neural(model, rho) => Ok((predict_tagged_query(model, q, *rho)?, None)),
        }
    }
}

fn corpus(cfg: &PipelineConfig) -> Result<LocalCorpus> {
    LocalCorpus::open(required(&cfg.corpus, "corpus")?, required(&cfg.ranking, "ranking")?)
}

fn idf(cfg: &PipelineConfig) -> Result<IdfTable> {
    match &cfg.idf {
        Some(p) => IdfTable::load(existing(p)?),
        None => Ok(IdfTable::uniform()),
    }
}

/// Tables from a JSONL dump when given, else every corpus table.
fn tables(cfg: &PipelineConfig, dump: Option<&Path>) -> Result<Vec<WebTable>> {
    match dump {
        Some(p) => read_tables_jsonl(open_file(p)?),
        None => corpus(cfg)?.all_tables(&ExtractConfig::default(), &DistinctNonNumeric),
    }
}

#[derive(Serialize)]
struct Explained<'a> {
    tagged: Option<&'a TaggedQuery>,
    reason: Option<RejectionReason>,
}

pub fn tag(cfg: &PipelineConfig, query: &str, explain: bool) -> Result<String> {
    let (tagged, reason) = Tagger::from_config(cfg)?.tag(&Query::new(query))?;
    if explain {
        json(&Explained {
            tagged: tagged.as_ref(),
            reason,
        })
    } else {
        json(&tagged)
    }
}

pub fn gen_train(cfg: &PipelineConfig, log: Option<&Path>) -> Result<String> {
    let log = match log {
        Some(p) => load_query_log(existing(p)?)?,
        None => load_query_log(required(&cfg.query_log, "query_log")?)?,
    };
    let gen = GenerationConfig {
        min_impressions: cfg.min_impressions,
        mix: cfg.mix,
        seed: cfg.seed,
    };
    let examples = generate(&log, &baseline(cfg)?, &gen)?;
    log::info!("generated {} training examples", examples.len());
    Ok(format_sequences(&examples.iter().map(|e| e.to_record()).collect::<Vec<_>>()))
}

pub fn train_tagger(cfg: &PipelineConfig, train_file: &Path) -> Result<String> {
    let examples: Vec<_> = load_sequences(existing(train_file)?)?.into_iter().map(|r| r.sequence).collect();
    let embeddings = EmbeddingTable::<f64>::load(required(&cfg.embeddings, "embeddings")?)?;
    let dictionary = baseline(cfg)?.types;
    let dictionary = match &cfg.tagger_types {
        Some(ids) => dictionary.subset(ids.iter().map(String::as_str))?,
        None => dictionary,
    };
    let config = TrainingConfig {
        epochs: cfg.epochs,
        seed: cfg.seed,
        ..TrainingConfig::default()
    };
    let trained = train(&examples, TagSet::from_dictionary(&dictionary), embeddings, &config)?;
    for (epoch, loss) in trained.loss_trace.iter().enumerate() {
        log::info!("epoch {}: mean token loss {loss:.6}", epoch + 1);
    }
    Ok(trained.model.to_json()? + "\n")
}

#[derive(Serialize)]
struct TaggingReport {
    mode: String,
    #[serde(flatten)]
    metrics: TaggingMetrics,
}

pub fn eval_tagger(cfg: &PipelineConfig, gold_file: &Path) -> Result<String> {
    let gold = load_tagging_gold(existing(gold_file)?)?;
    let tagger = Tagger::from_config(cfg)?;
    let predictions = gold.iter().map(|g| Ok(tagger.tag(&g.query)?.0)).collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = predictions.iter().zip(&gold).map(|(p, g)| (p.as_ref(), g.gold.as_ref())).collect();
    let metrics = tagging_metrics(&pairs, gold.len())?;
    json(&TaggingReport {
        mode: cfg.tagger_mode.to_string(),
        metrics,
    })
}

pub struct HtmlPage<'a> {
    pub path: &'a Path,
    pub url: String,
    pub title: String,
}

pub fn extract(cfg: &PipelineConfig, page: Option<HtmlPage<'_>>, idf_out: Option<&Path>) -> Result<String> {
    let tables = match page {
        Some(page) => {
            let html = std::fs::read(existing(page.path)?).map_err(|e| Error::Config(format!("cannot read {}: {e}", page.path.display())))?;
            let doc_id = page.path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let base = DocumentContext {
                doc_id,
                url: page.url,
                title: page.title,
                h1: String::new(),
                sr_rank: 0,
                static_rank: 0.0,
                num_tables_on_page: 0,
                page_text_length: 0,
            };
            extract_tables(&html, &base, &ExtractConfig::default(), &DistinctNonNumeric)?
        }
        None => tables(cfg, None)?,
    };
    if let Some(p) = idf_out {
        IdfTable::from_tables(&tables).save(p)?;
    }
    let mut buf = Vec::new();
    write_tables_jsonl(&mut buf, &tables)?;
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

fn records_text(records: &[FeatureRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_features_jsonl(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

/// Features of one query against its candidate pool.
pub fn featurize_query(cfg: &PipelineConfig, query: &str) -> Result<Vec<FeatureRecord>> {
    let q = Query::new(query);
    let Some(tq) = Tagger::from_config(cfg)?.tag(&q)?.0 else {
        log::warn!("{query:?} is not a list or superlative query; no features");
        return Ok(Vec::new());
    };
    let pool = candidate_pool(&tq, &corpus(cfg)?, cfg.k, &ExtractConfig::default(), &DistinctNonNumeric)?;
    let idf = idf(cfg)?;
    Ok(pool
        .tables
        .iter()
        .map(|t| FeatureRecord::new::<f64>(&q.normalized(), &t.reference(), &featurize(&tq, t, &idf), None))
        .collect())
}

/// Labelled features of every pair in a labels file.
pub fn featurize_labels(cfg: &PipelineConfig, labels_file: &Path, dump: Option<&Path>) -> Result<Vec<FeatureRecord>> {
    let labels = PairLabels::load(existing(labels_file)?)?;
    let by_ref: BTreeMap<String, WebTable> = tables(cfg, dump)?.into_iter().map(|t| (t.reference(), t)).collect();
    let tagger = Tagger::from_config(cfg)?;
    let idf = idf(cfg)?;
    let mut tagged: BTreeMap<&str, Option<TaggedQuery>> = BTreeMap::new();
    let mut out = Vec::new();
    for (query, table_ref, good) in labels.iter() {
        if !tagged.contains_key(query) {
            let tq = tagger.tag(&Query::new(query))?.0;
            if tq.is_none() {
                log::warn!("skipping {query:?}: not tagged");
            }
            tagged.insert(query, tq);
        }
        let Some(tq) = &tagged[query] else { continue };
        let t = by_ref
            .get(table_ref)
            .ok_or_else(|| Error::Data(format!("labelled table {table_ref} is not in the corpus")))?;
        out.push(FeatureRecord::new::<f64>(query, table_ref, &featurize(tq, t, &idf), Some(u8::from(good))));
    }
    Ok(out)
}

pub fn featurize_cmd(cfg: &PipelineConfig, query: Option<&str>, labels: Option<&Path>, dump: Option<&Path>) -> Result<String> {
    match (query, labels) {
        (Some(q), None) => records_text(&featurize_query(cfg, q)?),
        (None, Some(l)) => records_text(&featurize_labels(cfg, l, dump)?),
        _ => Err(Error::Config("featurize needs exactly one of --query or --labels".into())),
    }
}

fn read_records(path: &Path) -> Result<Vec<FeatureRecord>> {
    read_features_jsonl(open_file(path)?, &path.display().to_string())
}

pub fn train_selector_cmd(cfg: &PipelineConfig, features: &Path) -> Result<String> {
    let data = read_records(features)?
        .iter()
        .map(|r| {
            let label = r
                .label
                .ok_or_else(|| Error::Data(format!("record ({}, {}) has no label", r.query, r.table_ref)))?;
            Ok((r.vector::<f64>()?, label))
        })
        .collect::<Result<Vec<_>>>()?;
    let config = SelectorConfig {
        rounds: cfg.rounds,
        max_depth: cfg.depth,
        seed: cfg.seed,
        ..SelectorConfig::default()
    };
    let trained = train_selector(&data, &config)?;
    if let (Some(first), Some(last)) = (trained.loss_trace.first(), trained.loss_trace.last()) {
        log::info!("logistic loss {first:.6} -> {last:.6} over {} rounds", cfg.rounds);
    }
    Ok(trained.model.to_json()? + "\n")
}

/// Tag, retrieve, featurize and select for one query.
pub fn answer_output(cfg: &PipelineConfig, query: &str) -> Result<SelectionOutput> {
    let q = Query::new(query);
    let Some(tq) = Tagger::from_config(cfg)?.tag(&q)?.0 else {
        return Ok(SelectionOutput {
            query: query.to_string(),
            answer_table_ref: None,
            score: 0.0,
            threshold: cfg.theta,
        });
    };
    let model = SelectorModel::<f64>::load(required(&cfg.selector_model, "selector_model")?)?;
    let pool = candidate_pool(&tq, &corpus(cfg)?, cfg.k, &ExtractConfig::default(), &DistinctNonNumeric)?;
    let result = select_answer(&tq, &pool, &model, cfg.theta, &idf(cfg)?)?;
    Ok(SelectionOutput::new(query, &result, cfg.theta))
}

pub fn answer(cfg: &PipelineConfig, query: &str) -> Result<String> {
    json(&answer_output(cfg, query)?)
}

pub fn snippet(cfg: &PipelineConfig, query: &str, table_ref: &str, dump: Option<&Path>) -> Result<String> {
    let Some(tq) = Tagger::from_config(cfg)?.tag(&Query::new(query))?.0 else {
        return json(&None::<SnippetJson>);
    };
    let t = tables(cfg, dump)?
        .into_iter()
        .find(|t| t.reference() == table_ref)
        .ok_or_else(|| Error::Data(format!("no table {table_ref}")))?;
    let s = generate_snippet(&tq, &t, cfg.m, cfg.n, &SnippetConfig::default())?;
    json(&SnippetJson::from(&s))
}

pub fn eval_selector(cfg: &PipelineConfig, labels_file: &Path, thetas: &[f64], csv: bool) -> Result<String> {
    let labels = PairLabels::load(existing(labels_file)?)?;
    let tagger = Tagger::from_config(cfg)?;
    let model = SelectorModel::<f64>::load(required(&cfg.selector_model, "selector_model")?)?;
    let source = corpus(cfg)?;
    let idf = idf(cfg)?;
    let mut scored = Vec::new();
    for query in labels.queries() {
        let mut candidates = Vec::new();
        if let Some(tq) = tagger.tag(&Query::new(query))?.0 {
            let pool = candidate_pool(&tq, &source, cfg.k, &ExtractConfig::default(), &DistinctNonNumeric)?;
            let result = select_answer(&tq, &pool, &model, cfg.theta, &idf)?;
            candidates = pool
                .tables
                .iter()
                .zip(&result.all_scores)
                .map(|(t, &s)| (t.reference(), s, t.doc.sr_rank))
                .collect();
        }
        scored.push(ScoredQuery {
            query: query.to_string(),
            candidates,
        });
    }
    let points = pr_curve(&scored, &labels, thetas)?;
    if csv {
        Ok(pr_curve_csv(&points))
    } else {
        json(&points)
    }
}

pub fn feature_report_cmd(features: &Path, as_json: bool) -> Result<String> {
    let stats = feature_report(&read_records(features)?)?;
    if as_json {
        json(&stats)
    } else {
        Ok(format_feature_report(&stats))
    }
}
