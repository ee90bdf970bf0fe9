//! Evaluation: tagging precision and coverage, answer selection precision
//! and recall across thresholds, information gain and φ correlation of
//! boolean features, and ROC AUC.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::features::{FeatureRecord, FEATURE_NAMES};
use crate::lexicon::TypeId;
use crate::query::{Query, Span, TaggedQuery};
use crate::select::pick_best;

/// The gold PST span of a list or superlative query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldTag {
    pub span: Span,
    pub set_type: TypeId,
}

/// One row of a tagging gold file.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldQuery {
    pub query: Query,
    /// `None` for queries that are neither list nor superlative.
    pub gold: Option<GoldTag>,
    pub category: String,
}

/// Parses `query<TAB>pst|-<TAB>type|-[<TAB>category]` lines. The gold span
/// is the first occurrence of the PST tokens in the query.
pub fn parse_tagging_gold(text: &str, source_name: &str) -> Result<Vec<GoldQuery>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&f.len()) {
            return Err(Error::parse(source_name, line_no, "expected query, pst, type and an optional category"));
        }
        let query = Query::new(f[0]);
        let gold = match (f[1].trim(), f[2].trim()) {
            ("-", "-") => None,
            ("-", _) | (_, "-") => return Err(Error::parse(source_name, line_no, "pst and type must both be set or both be '-'")),
            (pst, ty) => {
                let pst: Vec<String> = crate::text::tokenize(pst);
                let start = query
                    .toks()
                    .windows(pst.len().max(1))
                    .position(|w| w == pst.as_slice())
                    .ok_or_else(|| Error::parse(source_name, line_no, format!("pst {:?} does not occur in the query", f[1])))?;
                Some(GoldTag {
                    span: Span::new(start, start + pst.len()),
                    set_type: TypeId::new(ty),
                })
            }
        };
        out.push(GoldQuery {
            query,
            gold,
            category: f.get(3).map_or_else(String::new, |c| c.trim().to_string()),
        });
    }
    Ok(out)
}

pub fn load_tagging_gold(path: impl AsRef<Path>) -> Result<Vec<GoldQuery>> {
    let path = path.as_ref();
    parse_tagging_gold(&read_to_string(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggingMetrics {
    pub tp: usize,
    pub fp: usize,
    pub n: usize,
    pub precision: Option<f64>,
    pub coverage: f64,
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

/// A prediction is a true positive when the gold query is positive and the
/// predicted PST span equals the gold one; every other non-null prediction
/// is a false positive.
pub fn tagging_metrics(outputs: &[(Option<&TaggedQuery>, Option<&GoldTag>)], n: usize) -> Result<TaggingMetrics> {
    if n == 0 {
        return Err(Error::contract("tagging metrics need N > 0"));
    }
    let mut tp = 0;
    let mut fp = 0;
    for (pred, gold) in outputs {
        match (pred, gold) {
            (None, _) => {}
            (Some(p), Some(g)) if p.span() == g.span => tp += 1,
            (Some(_), _) => fp += 1,
        }
    }
    Ok(TaggingMetrics {
        tp,
        fp,
        n,
        precision: ratio(tp, tp + fp),
        coverage: (tp + fp) as f64 / n as f64,
    })
}

/// Gold labels of query-table pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairLabels {
    labels: BTreeMap<(String, String), bool>,
}

impl PairLabels {
    pub fn insert(&mut self, query: &str, table_ref: &str, good: bool) {
        self.labels.insert((query.to_string(), table_ref.to_string()), good);
    }

    pub fn get(&self, query: &str, table_ref: &str) -> Option<bool> {
        self.labels.get(&(query.to_string(), table_ref.to_string())).copied()
    }

    pub fn has_positive(&self, query: &str) -> bool {
        self.labels.iter().any(|((q, _), &good)| good && q == query)
    }

    pub fn queries(&self) -> BTreeSet<&str> {
        self.labels.keys().map(|(q, _)| q.as_str()).collect()
    }

    /// Parses `query<TAB>table_ref<TAB>0|1` lines.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut out = PairLabels::default();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let good = match f.get(2).map(|l| l.trim()) {
                Some("1") => true,
                Some("0") => false,
                _ => return Err(Error::parse(source_name, idx + 1, "expected query<TAB>table_ref<TAB>0|1")),
            };
            out.insert(&Query::new(f[0]).normalized(), f[1].trim(), good);
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    /// Every labelled `(query, table_ref, good)` triple in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, bool)> {
        self.labels.iter().map(|((q, t), &g)| (q.as_str(), t.as_str(), g))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn from_records(records: &[FeatureRecord]) -> Self {
        let mut out = PairLabels::default();
        for r in records {
            if let Some(l) = r.label {
                out.insert(&r.query, &r.table_ref, l == 1);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl SelectionMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        SelectionMetrics {
            tp,
            fp,
            fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    }
}

/// `results` holds each query with the table it returned, if any.
pub fn selection_metrics(results: &[(String, Option<String>)], gold: &PairLabels) -> Result<SelectionMetrics> {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (q, returned) in results {
        match returned {
            Some(t) => match gold.get(q, t) {
                Some(true) => tp += 1,
                Some(false) => fp += 1,
                None => return Err(Error::data(format!("no gold label for returned pair ({q}, {t})"))),
            },
            None if gold.has_positive(q) => fn_ += 1,
            None => {}
        }
    }
    Ok(SelectionMetrics::from_counts(tp, fp, fn_))
}

/// Scored candidates of one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredQuery {
    pub query: String,
    /// `(table_ref, score, sr_rank)` in extraction order.
    pub candidates: Vec<(String, f64, u32)>,
}

impl ScoredQuery {
    fn best_index(&self, theta: f64) -> Option<usize> {
        let scores: Vec<f64> = self.candidates.iter().map(|c| c.1).collect();
        let ranks: Vec<u32> = self.candidates.iter().map(|c| c.2).collect();
        pick_best(&scores, &ranks, theta)
    }

    /// The table returned at threshold `theta`.
    pub fn returned(&self, theta: f64) -> Option<&str> {
        self.best_index(theta).map(|i| self.candidates[i].0.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub theta: f64,
    pub metrics: SelectionMetrics,
}

/// Precision and recall at every threshold of `thetas`, from one pass of
/// argmax per query.
pub fn pr_curve(scored: &[ScoredQuery], gold: &PairLabels, thetas: &[f64]) -> Result<Vec<PrPoint>> {
    let best: Vec<(&str, Option<(&str, f64)>)> = scored
        .iter()
        .map(|sq| {
            let top = sq
                .best_index(f64::NEG_INFINITY)
                .map(|i| (sq.candidates[i].0.as_str(), sq.candidates[i].1));
            (sq.query.as_str(), top)
        })
        .collect();
    let mut labels = Vec::with_capacity(best.len());
    for (q, top) in &best {
        let label = match top {
            Some((t, _)) => Some(gold.get(q, t).ok_or_else(|| Error::data(format!("no gold label for pair ({q}, {t})")))?),
            None => None,
        };
        labels.push((label, gold.has_positive(q)));
    }
    Ok(thetas
        .iter()
        .map(|&theta| {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for ((_, top), (label, has_pos)) in best.iter().zip(&labels) {
                match (top, label) {
                    (Some((_, s)), Some(good)) if *s > theta => {
                        if *good {
                            tp += 1
                        } else {
                            fp += 1
                        }
                    }
                    _ if *has_pos => fn_ += 1,
                    _ => {}
                }
            }
            PrPoint {
                theta,
                metrics: SelectionMetrics::from_counts(tp, fp, fn_),
            }
        })
        .collect())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

pub fn pr_curve_csv(points: &[PrPoint]) -> String {
    let mut out = String::from("theta,precision,recall\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.theta, opt(p.metrics.precision), opt(p.metrics.recall));
    }
    out
}

/// Binary entropy of a count split, in bits.
fn entropy(a: usize, b: usize) -> f64 {
    let n = (a + b) as f64;
    [a, b]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// `H(label) − H(label | feature > 0)` in bits.
pub fn information_gain(feature: &[f64], labels: &[bool]) -> Result<f64> {
    if feature.is_empty() {
        return Err(Error::contract("information gain needs at least one example"));
    }
    if feature.len() != labels.len() {
        return Err(Error::contract("feature and label lengths differ"));
    }
    let c = ContingencyCounts::from_pairs(feature.iter().map(|&v| v > 0.0).zip(labels.iter().copied()));
    let n = feature.len() as f64;
    let h = entropy(c.n1_(), c.n0_());
    let cond = (c.n_1() as f64 / n) * entropy(c.n11, c.n01) + (c.n_0() as f64 / n) * entropy(c.n10, c.n00);
    Ok((h - cond).max(0.0))
}

/// 2×2 counts; `n{label}{feature}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContingencyCounts {
    pub n11: usize,
    pub n10: usize,
    pub n01: usize,
    pub n00: usize,
}

impl ContingencyCounts {
    /// From `(feature, label)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = ContingencyCounts::default();
        for (f, l) in pairs {
            match (l, f) {
                (true, true) => c.n11 += 1,
                (true, false) => c.n10 += 1,
                (false, true) => c.n01 += 1,
                (false, false) => c.n00 += 1,
            }
        }
        c
    }

    pub fn n1_(&self) -> usize {
        self.n11 + self.n10
    }

    pub fn n0_(&self) -> usize {
        self.n01 + self.n00
    }

    pub fn n_1(&self) -> usize {
        self.n11 + self.n01
    }

    pub fn n_0(&self) -> usize {
        self.n10 + self.n00
    }
}

/// Reason φ is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroMarginal {
    LabelPositive,
    LabelNegative,
    FeaturePositive,
    FeatureNegative,
}

impl fmt::Display for ZeroMarginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroMarginal::LabelPositive => "no positive labels",
            ZeroMarginal::LabelNegative => "no negative labels",
            ZeroMarginal::FeaturePositive => "feature never fires",
            ZeroMarginal::FeatureNegative => "feature always fires",
        })
    }
}

pub fn phi_coefficient(c: &ContingencyCounts) -> std::result::Result<f64, ZeroMarginal> {
    let margins = [
        (c.n1_(), ZeroMarginal::LabelPositive),
        (c.n0_(), ZeroMarginal::LabelNegative),
        (c.n_1(), ZeroMarginal::FeaturePositive),
        (c.n_0(), ZeroMarginal::FeatureNegative),
    ];
    if let Some((_, why)) = margins.iter().find(|(m, _)| *m == 0) {
        return Err(*why);
    }
    let num = (c.n11 * c.n00) as f64 - (c.n10 * c.n01) as f64;
    let den = margins.iter().map(|(m, _)| *m as f64).product::<f64>().sqrt();
    Ok((num / den).clamp(-1.0, 1.0))
}

pub fn feature_group_or(features: &[Vec<bool>]) -> Result<Vec<bool>> {
    let first = features.first().ok_or_else(|| Error::contract("feature group is empty"))?;
    if features.iter().any(|f| f.len() != first.len()) {
        return Err(Error::contract("feature vectors differ in length"));
    }
    Ok((0..first.len()).map(|i| features.iter().any(|f| f[i])).collect())
}

/// Probability that a random positive outscores a random negative, ties
/// counting half. `None` without both classes.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut rank_sum, mut pos) = (0.0, 0usize);
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            if labels[k] {
                rank_sum += avg_rank;
                pos += 1;
            }
        }
        i = j + 1;
    }
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    Some((rank_sum - (pos * (pos + 1)) as f64 / 2.0) / (pos * neg) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub name: String,
    pub information_gain: f64,
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_undefined: Option<String>,
}

/// Named groups of features scored together by OR.
pub const FEATURE_GROUPS: [(&str, &[&str]); 2] = [
    (
        "table_search_text",
        &["qInPageTitle", "qInTableTitle", "qInColNames", "qInLeftmostCol", "qInSecondLeftCol", "qInOtherCol", "qInSurrText"],
    ),
    (
        "structure_aware",
        &[
            "SubjectColName_SET_Match",
            "SubjectColValues_SET_Match",
            "SectionHeadings_SET_Match",
            "AllHeadings_SET_Match",
            "PremodPostmod_MaxColHits",
        ],
    ),
];

/// Information gain and φ for every feature and feature group over the
/// labelled records.
pub fn feature_report(records: &[FeatureRecord]) -> Result<Vec<FeatureStat>> {
    let labelled: Vec<&FeatureRecord> = records.iter().filter(|r| r.label.is_some()).collect();
    if labelled.is_empty() {
        return Err(Error::data("feature report needs labelled records"));
    }
    let labels: Vec<bool> = labelled.iter().map(|r| r.label == Some(1)).collect();
    let column = |name: &str| -> Vec<f64> { labelled.iter().map(|r| r.features.get(name).copied().unwrap_or(0.0)).collect() };
    let stat = |name: &str, values: &[f64]| -> Result<FeatureStat> {
        let c = ContingencyCounts::from_pairs(values.iter().map(|&v| v > 0.0).zip(labels.iter().copied()));
        let phi = phi_coefficient(&c);
        Ok(FeatureStat {
            name: name.to_string(),
            information_gain: information_gain(values, &labels)?,
            phi: phi.ok(),
            phi_undefined: phi.err().map(|z| z.to_string()),
        })
    };
    let mut out = Vec::new();
    for name in FEATURE_NAMES {
        out.push(stat(name, &column(name))?);
    }
    for (group, members) in FEATURE_GROUPS {
        let bools: Vec<Vec<bool>> = members.iter().map(|m| column(m).iter().map(|&v| v > 0.0).collect()).collect();
        let or: Vec<f64> = feature_group_or(&bools)?.into_iter().map(|b| f64::from(u8::from(b))).collect();
        out.push(stat(&format!("group:{group}"), &or)?);
    }
    Ok(out)
}

pub fn format_feature_report(stats: &[FeatureStat]) -> String {
    let width = stats.iter().map(|s| s.name.len()).max().unwrap_or(0);
    let mut out = format!("{:width$}  {:>8}  {:>8}\n", "feature", "ig_bits", "phi");
    for s in stats {
        let phi = s.phi.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
        let _ = writeln!(out, "{:width$}  {:>8.4}  {:>8}", s.name, s.information_gain, phi);
    }
    out
}
