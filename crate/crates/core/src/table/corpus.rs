use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::html::{extract_tables, ExtractConfig};
use super::subject::SubjectColumnScorer;
use super::{CandidatePool, DocumentContext, WebTable};
use crate::error::{read_to_string, Error, Result, RetrievalKind};
use crate::query::{Query, TaggedQuery};

/// Sidecar metadata of a corpus page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DocMeta {
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub static_rank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievedDocument {
    pub doc_id: String,
    /// 1-based.
    pub rank: u32,
    pub meta: DocMeta,
    pub html: Vec<u8>,
}

/// Ranked document retrieval for a query.
pub trait SearchSource {
    fn top_documents(&self, query: &Query, k: usize) -> Result<Vec<RetrievedDocument>>;
}

/// A directory of `*.html` pages with `*.meta.json` sidecars and a ranking
/// file of `query<TAB>doc1,doc2,...` lines.
#[derive(Debug, Clone)]
pub struct LocalCorpus {
    dir: PathBuf,
    rankings: BTreeMap<String, Vec<String>>,
}

fn retrieval(kind: RetrievalKind, message: String) -> Error {
    Error::Retrieval { kind, message }
}

fn io_kind(e: &std::io::Error) -> RetrievalKind {
    use std::io::ErrorKind::*;
    match e.kind() {
        Interrupted | TimedOut | WouldBlock => RetrievalKind::Transient,
        _ => RetrievalKind::Permanent,
    }
}

impl LocalCorpus {
    pub fn open(dir: impl AsRef<Path>, ranking_file: impl AsRef<Path>) -> Result<Self> {
        let ranking_file = ranking_file.as_ref();
        let text = read_to_string(ranking_file)?;
        let mut rankings = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (q, docs) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(ranking_file.display().to_string(), i + 1, "expected query<TAB>doc list"))?;
            let docs: Vec<String> = docs.split(',').map(|d| d.trim().to_string()).filter(|d| !d.is_empty()).collect();
            rankings.insert(Query::new(q).normalized(), docs);
        }
        Ok(LocalCorpus {
            dir: dir.as_ref().to_path_buf(),
            rankings,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Ids of every page in the directory, sorted.
    pub fn doc_ids(&self) -> Result<Vec<String>> {
        let entries = std::fs::read_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut ids = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&self.dir, e))?.path();
            if path.extension().is_some_and(|x| x == "html") {
                if let Some(stem) = path.file_stem() {
                    ids.push(stem.to_string_lossy().into_owned());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn load(&self, doc_id: &str, rank: u32) -> Result<RetrievedDocument> {
        let html_path = self.dir.join(format!("{doc_id}.html"));
        let html = std::fs::read(&html_path)
            .map_err(|e| retrieval(io_kind(&e), format!("{}: {e}", html_path.display())))?;
        let meta_path = self.dir.join(format!("{doc_id}.meta.json"));
        let meta = match std::fs::read_to_string(&meta_path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| Error::Document {
                doc: doc_id.to_string(),
                message: format!("bad metadata: {e}"),
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => DocMeta {
                url: String::new(),
                title: String::new(),
                static_rank: 0.0,
            },
            Err(e) => return Err(retrieval(io_kind(&e), format!("{}: {e}", meta_path.display()))),
        };
        Ok(RetrievedDocument {
            doc_id: doc_id.to_string(),
            rank,
            meta,
            html,
        })
    }

    /// Extracts the tables of every page, with `sr_rank` 0.
    pub fn all_tables(&self, cfg: &ExtractConfig, scorer: &dyn SubjectColumnScorer) -> Result<Vec<WebTable>> {
        let mut out = Vec::new();
        for id in self.doc_ids()? {
            let doc = self.load(&id, 0)?;
            match extract_tables(&doc.html, &context_of(&doc), cfg, scorer) {
                Ok(tables) => out.extend(tables),
                Err(e) => log::warn!("skipping {id}: {e}"),
            }
        }
        Ok(out)
    }
}

impl SearchSource for LocalCorpus {
    fn top_documents(&self, query: &Query, k: usize) -> Result<Vec<RetrievedDocument>> {
        let Some(docs) = self.rankings.get(&query.normalized()) else {
            return Ok(Vec::new());
        };
        docs.iter()
            .take(k)
            .enumerate()
            .map(|(i, id)| self.load(id, i as u32 + 1))
            .collect()
    }
}

fn context_of(doc: &RetrievedDocument) -> DocumentContext {
    DocumentContext {
        doc_id: doc.doc_id.clone(),
        url: doc.meta.url.clone(),
        title: doc.meta.title.clone(),
        h1: String::new(),
        sr_rank: doc.rank,
        static_rank: doc.meta.static_rank,
        num_tables_on_page: 0,
        page_text_length: 0,
    }
}

/// Tables of the top-`k` documents for the tagged query, in rank order.
/// A document that fails to parse is skipped with a warning.
pub fn candidate_pool(
    tq: &TaggedQuery,
    source: &dyn SearchSource,
    k: usize,
    cfg: &ExtractConfig,
    scorer: &dyn SubjectColumnScorer,
) -> Result<CandidatePool> {
    let mut docs = source.top_documents(tq.query(), k)?;
    docs.sort_by_key(|d| d.rank);
    docs.truncate(k);
    let mut tables = Vec::new();
    for doc in &docs {
        match extract_tables(&doc.html, &context_of(doc), cfg, scorer) {
            Ok(ts) => tables.extend(ts),
            Err(e) => log::warn!("skipping document {}: {e}", doc.doc_id),
        }
    }
    Ok(CandidatePool {
        query: tq.clone(),
        tables,
    })
}

pub fn write_tables_jsonl<W: Write>(mut out: W, tables: &[WebTable]) -> Result<()> {
    for t in tables {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn read_tables_jsonl<R: BufRead>(input: R) -> Result<Vec<WebTable>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let t: WebTable = serde_json::from_str(&line).map_err(|e| Error::parse("tables", i + 1, e.to_string()))?;
        if !t.is_well_formed() {
            return Err(Error::parse("tables", i + 1, "table grid is not rectangular or subject column is out of range"));
        }
        out.push(t);
    }
    Ok(out)
}
