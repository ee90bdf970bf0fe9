//! Query-table features: page and table quality, query token hits per
//! field, and the structure-aware matches against the tagged intent.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::query::TaggedQuery;
use crate::scalar::Scalar;
use crate::table::WebTable;
use crate::text::{cont_folded, fold, singularize, tokenize};

pub const FEATURE_NAMES: [&str; 23] = [
    "numRows",
    "numCols",
    "emptyCellRatio",
    "columnNamesPresent",
    "tableImportance",
    "tablePageFraction",
    "srRank",
    "staticRank",
    "qInPageTitle",
    "qInTableTitle",
    "qInColNames",
    "qInLeftmostCol",
    "qInSecondLeftCol",
    "qInOtherCol",
    "qInSurrText",
    "SubjectColName_SET_Match",
    "SubjectColValues_SET_Match",
    "SectionHeadings_SET_Match",
    "AllHeadings_SET_Match",
    "PremodPostmod_MaxColHits",
    "PremodPostmod_FullMatch",
    "PremodPostmod_MissingTokens",
    "PremodPostmod_IdfMissingFrac",
];

pub const NUM_FEATURES: usize = FEATURE_NAMES.len();

/// The query-table text match features among [`FEATURE_NAMES`].
pub const TEXT_MATCH_FEATURES: [&str; 7] = [
    "qInPageTitle",
    "qInTableTitle",
    "qInColNames",
    "qInLeftmostCol",
    "qInSecondLeftCol",
    "qInOtherCol",
    "qInSurrText",
];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// FNV-1a over the feature names, identifying the feature order.
pub fn feature_fingerprint() -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for name in FEATURE_NAMES {
        for b in name.bytes().chain([0]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{NUM_FEATURES}:{h:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct FeatureVector<F> {
    values: Vec<F>,
}

impl<F: Scalar> FeatureVector<F> {
    pub fn from_values(values: Vec<F>) -> Result<Self> {
        if values.len() != NUM_FEATURES {
            return Err(Error::contract(format!(
                "feature vector needs {NUM_FEATURES} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("feature values must be finite"));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<F> {
        feature_index(name).map(|i| self.values[i])
    }

    pub fn set(&mut self, name: &str, value: F) -> Result<()> {
        let i = feature_index(name).ok_or_else(|| Error::contract(format!("unknown feature {name}")))?;
        self.values[i] = value;
        Ok(())
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        FEATURE_NAMES
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.to_string(), v.as_f64()))
            .collect()
    }

    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        if let Some(extra) = map.keys().find(|k| feature_index(k).is_none()) {
            return Err(Error::data(format!("unknown feature {extra}")));
        }
        let values = FEATURE_NAMES
            .iter()
            .map(|n| {
                map.get(*n)
                    .map(|&v| F::of(v))
                    .ok_or_else(|| Error::data(format!("missing feature {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(values)
    }
}

/// Smoothed inverse document frequencies over folded tokens.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdfTable {
    n: u64,
    df: BTreeMap<String, u64>,
}

impl IdfTable {
    /// Every token weighs 1.
    pub fn uniform() -> Self {
        IdfTable::default()
    }

    pub fn is_uniform(&self) -> bool {
        self.n == 0
    }

    /// One document per table, made of its cell text.
    pub fn from_tables(tables: &[WebTable]) -> Self {
        let mut df = BTreeMap::new();
        for t in tables {
            let toks: BTreeSet<String> = t
                .cells
                .iter()
                .flatten()
                .flat_map(|c| tokenize(c))
                .map(|tok| singularize(&tok))
                .collect();
            for tok in toks {
                *df.entry(tok).or_insert(0) += 1;
            }
        }
        IdfTable {
            n: tables.len() as u64,
            df,
        }
    }

    pub fn idf(&self, token: &str) -> f64 {
        if self.is_uniform() {
            return 1.0;
        }
        let df = self.df.get(&singularize(token)).copied().unwrap_or(0);
        ((self.n + 1) as f64 / (df + 1) as f64).ln() + 1.0
    }

    /// `N=<count>` header, then `token<TAB>df` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (i, header) = lines.next().ok_or_else(|| Error::parse(source_name, 1, "missing N= header"))?;
        let n = header
            .trim()
            .strip_prefix("N=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(source_name, i + 1, "expected N=<corpus size>"))?;
        let mut df = BTreeMap::new();
        for (i, line) in lines {
            let (tok, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected token<TAB>df"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(source_name, i + 1, format!("bad df {count:?}")))?;
            if count > n {
                return Err(Error::parse(source_name, i + 1, "df exceeds N"));
            }
            df.insert(tok.trim().to_string(), count);
        }
        Ok(IdfTable { n, df })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    pub fn format(&self) -> String {
        let mut out = format!("N={}\n", self.n);
        for (tok, df) in &self.df {
            out.push_str(&format!("{tok}\t{df}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.format()).map_err(|e| Error::io(path, e))
    }
}

fn folded_set<'a>(texts: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
    texts.into_iter().flat_map(tokenize).map(|t| singularize(&t)).collect()
}

fn folded(text: &str) -> Vec<String> {
    fold(&tokenize(text))
}

/// Distinct folded query tokens present in `field`.
fn hits(query: &BTreeSet<String>, field: &BTreeSet<String>) -> usize {
    query.intersection(field).count()
}

/// Folded PST and type-name token lists, the two targets of SET matching.
fn set_targets(tq: &TaggedQuery) -> [Vec<String>; 2] {
    [fold(tq.pst_tokens()), fold(&tq.set_type().tokens())]
}

fn set_match(text: &str, targets: &[Vec<String>; 2]) -> bool {
    let s = folded(text);
    targets.iter().any(|t| !t.is_empty() && cont_folded(&s, t))
}

pub fn baseline_features(tq: &TaggedQuery, t: &WebTable) -> [f64; 15] {
    let q = folded_set(tq.toks().iter().map(String::as_str));
    let rows = t.num_rows();
    let cols = t.num_cols();
    let cells = rows * cols;
    let empty = t.cells.iter().flatten().filter(|c| c.trim().is_empty()).count();
    let col_set = |c: usize| folded_set(if c < cols { Some(t.column(c)) } else { None }.into_iter().flatten());
    let other = folded_set((2..cols).flat_map(|c| t.column(c)));
    [
        rows as f64,
        cols as f64,
        if cells == 0 { 0.0 } else { empty as f64 / cells as f64 },
        f64::from(u8::from(!t.column_names.is_empty())),
        t.table_importance(),
        t.table_page_fraction(),
        f64::from(t.doc.sr_rank),
        t.doc.static_rank,
        hits(&q, &folded_set([t.doc.title.as_str()])) as f64,
        hits(&q, &folded_set([t.caption.as_str()])) as f64,
        hits(&q, &folded_set(t.column_names.iter().map(String::as_str))) as f64,
        hits(&q, &col_set(0)) as f64,
        hits(&q, &col_set(1)) as f64,
        hits(&q, &other) as f64,
        hits(&q, &folded_set([t.surrounding_text.as_str()])) as f64,
    ]
}

pub fn subject_colname_set_match(tq: &TaggedQuery, t: &WebTable) -> bool {
    set_match(t.subject_col_name(), &set_targets(tq))
}

pub fn subject_colvalues_set_match(tq: &TaggedQuery, t: &WebTable) -> usize {
    let targets = set_targets(tq);
    t.subject_cells().filter(|c| set_match(c, &targets)).count()
}

pub fn section_headings_set_match(tq: &TaggedQuery, t: &WebTable) -> bool {
    set_match(&t.section_heading, &set_targets(tq))
}

pub fn all_headings_set_match(tq: &TaggedQuery, t: &WebTable) -> bool {
    set_match(&t.all_headings, &set_targets(tq))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifierMatch {
    pub max_col_hits: usize,
    pub full_match: bool,
    pub missing_tokens: usize,
    pub idf_missing_frac: f64,
}

/// Premodifier and postmodifier matches against the table.
///
/// A cell hits when it contains any modifier token. `missing_tokens` counts
/// modifier token occurrences found in no field of the table or its page.
pub fn premod_postmod_match(tq: &TaggedQuery, t: &WebTable, idf: &IdfTable) -> ModifierMatch {
    let mods = fold(&tq.modifier_tokens().cloned().collect::<Vec<_>>());
    if mods.is_empty() {
        return ModifierMatch {
            max_col_hits: 0,
            full_match: true,
            missing_tokens: 0,
            idf_missing_frac: 0.0,
        };
    }
    let mod_set: BTreeSet<&str> = mods.iter().map(String::as_str).collect();
    let mut max_col_hits = 0;
    let mut in_cells: BTreeSet<String> = BTreeSet::new();
    for c in (0..t.num_cols()).filter(|&c| c != t.subject_col) {
        let mut col_hits = 0;
        for cell in t.column(c) {
            let toks = folded_set([cell]);
            if toks.iter().any(|x| mod_set.contains(x.as_str())) {
                col_hits += 1;
            }
            in_cells.extend(toks);
        }
        max_col_hits = max_col_hits.max(col_hits);
    }
    let full_match = mods.iter().all(|m| in_cells.contains(m));
    let everywhere = folded_set(
        [
            t.doc.title.as_str(),
            t.doc.h1.as_str(),
            t.caption.as_str(),
            t.section_heading.as_str(),
            t.all_headings.as_str(),
            t.surrounding_text.as_str(),
        ]
        .into_iter()
        .chain(t.column_names.iter().map(String::as_str))
        .chain(t.cells.iter().flatten().map(String::as_str)),
    );
    let missing: Vec<&String> = mods.iter().filter(|m| !everywhere.contains(*m)).collect();
    let total_idf = mods.iter().fold(0.0, |acc, m| acc + idf.idf(m));
    let missing_idf = missing.iter().fold(0.0, |acc, m| acc + idf.idf(m));
    ModifierMatch {
        max_col_hits,
        full_match,
        missing_tokens: missing.len(),
        idf_missing_frac: if total_idf > 0.0 { missing_idf / total_idf } else { 0.0 },
    }
}

pub fn featurize<F: Scalar>(tq: &TaggedQuery, t: &WebTable, idf: &IdfTable) -> FeatureVector<F> {
    let m = premod_postmod_match(tq, t, idf);
    let flag = |b: bool| f64::from(u8::from(b));
    let mut values: Vec<f64> = baseline_features(tq, t).to_vec();
    values.extend([
        flag(subject_colname_set_match(tq, t)),
        subject_colvalues_set_match(tq, t) as f64,
        flag(section_headings_set_match(tq, t)),
        flag(all_headings_set_match(tq, t)),
        m.max_col_hits as f64,
        flag(m.full_match),
        m.missing_tokens as f64,
        m.idf_missing_frac,
    ]);
    FeatureVector {
        values: values.into_iter().map(F::of).collect(),
    }
}

/// One line of a feature dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub query: String,
    pub table_ref: String,
    pub features: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
}

impl FeatureRecord {
    pub fn new<F: Scalar>(query: &str, table_ref: &str, fv: &FeatureVector<F>, label: Option<u8>) -> Self {
        FeatureRecord {
            query: query.to_string(),
            table_ref: table_ref.to_string(),
            features: fv.to_map(),
            label,
        }
    }

    pub fn vector<F: Scalar>(&self) -> Result<FeatureVector<F>> {
        FeatureVector::from_map(&self.features)
    }
}

pub fn write_features_jsonl<W: Write>(mut out: W, records: &[FeatureRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn read_features_jsonl<R: BufRead>(input: R, source_name: &str) -> Result<Vec<FeatureRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source_name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: FeatureRecord = serde_json::from_str(&line).map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        r.vector::<f64>().map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        if r.label.is_some_and(|l| l > 1) {
            return Err(Error::parse(source_name, i + 1, "label must be 0 or 1"));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::TypeId;
    use crate::query::{Intent, Query, Span};
    use crate::table::DocumentContext;

    fn tq(q: &str, span: (usize, usize), ty: &str) -> TaggedQuery {
        TaggedQuery::new(Query::new(q), Intent::List, Span::new(span.0, span.1), TypeId::new(ty), 1.0).unwrap()
    }

    fn table(names: &[&str], rows: &[&[&str]], subject: usize) -> WebTable {
        WebTable {
            doc: DocumentContext {
                doc_id: "d".into(),
                url: String::new(),
                title: "Tom Cruise Movies".into(),
                h1: "Tom Cruise Movies".into(),
                sr_rank: 1,
                static_rank: 0.5,
                num_tables_on_page: 1,
                page_text_length: 100,
            },
            table_index: 0,
            caption: String::new(),
            section_heading: String::new(),
            all_headings: "Tom Cruise Movies".into(),
            surrounding_text: String::new(),
            column_names: names.iter().map(|s| s.to_string()).collect(),
            subject_col: subject,
            cells: rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
            table_char_length: 40,
        }
    }

    #[test]
    fn page_title_hits() {
        let f = baseline_features(&tq("tom cruise movies", (2, 3), "film"), &table(&["a"], &[&["x"]], 0));
        assert_eq!(f[8], 3.0);
        assert_eq!(f[4], 1.0);
        assert_eq!(f[5], 0.4);
    }

    #[test]
    fn subject_matches() {
        let q = tq("tom cruise movies", (2, 3), "film");
        assert!(subject_colname_set_match(&q, &table(&["year", "movie"], &[&["1", "x"]], 1)));
        assert!(!subject_colname_set_match(&q, &table(&["year", "actor"], &[&["1", "x"]], 1)));
        assert!(!subject_colname_set_match(&q, &table(&[], &[&["1", "x"]], 1)));
        let lakes = tq("lakes in washington", (0, 1), "lake");
        let t = table(&["name"], &[&["Lake Washington"], &["Lake Tahoe"], &["Crater Lake"]], 0);
        assert_eq!(subject_colvalues_set_match(&lakes, &t), 3);
        let t = table(&["name"], &[&["Top Gun"], &["The Mummy"]], 0);
        assert_eq!(subject_colvalues_set_match(&q, &t), 0);
    }

    #[test]
    fn headings() {
        let q = tq("tom cruise movies", (2, 3), "film");
        let mut t = table(&["a"], &[&["x"]], 0);
        assert_eq!((section_headings_set_match(&q, &t), all_headings_set_match(&q, &t)), (false, true));
        t.section_heading = "Movies".into();
        assert!(section_headings_set_match(&q, &t));
        t.section_heading.clear();
        t.all_headings.clear();
        assert_eq!((section_headings_set_match(&q, &t), all_headings_set_match(&q, &t)), (false, false));
    }

    #[test]
    fn modifiers() {
        let t = table(&["year", "movie"], &[&["2017", "The Mummy"], &["2016", "Jack Reacher"]], 1);
        let q = tq("2017 tom cruise movies", (3, 4), "film");
        let m = premod_postmod_match(&q, &t, &IdfTable::uniform());
        assert_eq!(m.max_col_hits, 1);
        assert!(!m.full_match);
        assert_eq!(m.missing_tokens, 0);
        let q = tq("movies", (0, 1), "film");
        let m = premod_postmod_match(&q, &t, &IdfTable::uniform());
        assert_eq!((m.max_col_hits, m.full_match, m.missing_tokens, m.idf_missing_frac), (0, true, 0, 0.0));
        let q = tq("zorro zebra movies", (2, 3), "film");
        let m = premod_postmod_match(&q, &t, &IdfTable::uniform());
        assert_eq!((m.missing_tokens, m.idf_missing_frac), (2, 1.0));
    }

    #[test]
    fn idf_smoothing_and_file() {
        let t = table(&["a"], &[&["lake"], &["city"]], 0);
        let mut u = t.clone();
        u.cells = vec![vec!["lakes".into()]];
        let idf = IdfTable::from_tables(&[t, u]);
        assert!((idf.idf("lake") - (3.0f64 / 3.0).ln() - 1.0).abs() < 1e-12);
        assert!((idf.idf("city") - (3.0f64 / 2.0).ln() - 1.0).abs() < 1e-12);
        assert!((idf.idf("unseen") - 3.0f64.ln() - 1.0).abs() < 1e-12);
        assert_eq!(IdfTable::parse(&idf.format(), "x").unwrap(), idf);
        assert!(IdfTable::parse("lake\t1\n", "x").is_err());
        assert_eq!(IdfTable::uniform().idf("x"), 1.0);
    }

    #[test]
    fn vector_roundtrip() {
        let fv: FeatureVector<f64> = featurize(&tq("tom cruise movies", (2, 3), "film"), &table(&["a"], &[&["x"]], 0), &IdfTable::uniform());
        assert_eq!(fv.values().len(), NUM_FEATURES);
        assert_eq!(FeatureVector::<f64>::from_map(&fv.to_map()).unwrap(), fv);
        let f32v = FeatureVector::<f32>::from_map(&fv.to_map()).unwrap();
        assert_eq!(f32v.values().len(), NUM_FEATURES);
    }
}
