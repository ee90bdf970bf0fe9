//! m×n display snippets of an answer table.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query::TaggedQuery;
use crate::table::WebTable;
use crate::text::{fold, singularize, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerMode {
    EntireTable,
    Subset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetConfig {
    /// A column is skipped when more than this fraction of cells is empty.
    pub max_empty_fraction: f64,
    /// Or when more than this fraction of rows repeats one value.
    pub max_repeat_fraction: f64,
}

impl Default for SnippetConfig {
    fn default() -> Self {
        SnippetConfig {
            max_empty_fraction: 0.5,
            max_repeat_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snippet {
    pub mode: AnswerMode,
    pub row_indices: Vec<usize>,
    /// Ascending.
    pub col_indices: Vec<usize>,
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub doc_title: String,
    pub url: String,
}

/// Serialized form of a [`Snippet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetJson {
    pub rows: Vec<Vec<String>>,
    pub columns: Vec<String>,
    pub title: String,
    pub url: String,
}

impl From<&Snippet> for SnippetJson {
    fn from(s: &Snippet) -> Self {
        SnippetJson {
            rows: s.rows.clone(),
            columns: s.column_names.clone(),
            title: s.doc_title.clone(),
            url: s.url.clone(),
        }
    }
}

struct Hits {
    rows: Vec<bool>,
    cols: Vec<bool>,
}

fn modifier_hits(tq: &TaggedQuery, t: &WebTable) -> Hits {
    let mods: BTreeSet<String> = fold(&tq.modifier_tokens().cloned().collect::<Vec<_>>()).into_iter().collect();
    let hit = |text: &str| tokenize(text).iter().any(|tok| mods.contains(&singularize(tok)));
    let mut rows = vec![false; t.num_rows()];
    let mut cols = vec![false; t.num_cols()];
    if mods.is_empty() {
        return Hits { rows, cols };
    }
    for (c, col_hit) in cols.iter_mut().enumerate() {
        *col_hit = hit(t.column_name(c));
        if c == t.subject_col {
            continue;
        }
        for (r, row_hit) in rows.iter_mut().enumerate() {
            if hit(t.cell(r, c)) {
                *row_hit = true;
                *col_hit = true;
            }
        }
    }
    Hits { rows, cols }
}

/// `Subset` when a modifier token hits a column name or a non-subject cell.
pub fn detect_answer_mode(tq: &TaggedQuery, t: &WebTable) -> AnswerMode {
    let h = modifier_hits(tq, t);
    if h.cols.iter().any(|&c| c) {
        AnswerMode::Subset
    } else {
        AnswerMode::EntireTable
    }
}

fn is_poor_column(t: &WebTable, c: usize, cfg: &SnippetConfig) -> bool {
    let rows = t.num_rows();
    if rows == 0 {
        return false;
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut empty = 0;
    for v in t.column(c) {
        let v = v.trim();
        if v.is_empty() {
            empty += 1;
        } else {
            *counts.entry(v.to_lowercase()).or_insert(0) += 1;
        }
    }
    let top = counts.values().copied().max().unwrap_or(0);
    empty as f64 > cfg.max_empty_fraction * rows as f64 || (top >= 2 && top as f64 > cfg.max_repeat_fraction * rows as f64)
}

/// Picks at most `m` rows and `n` columns, always keeping the subject
/// column. Whole-table answers take the top rows; subset answers put the
/// rows with modifier hits first and prefer columns with hits.
pub fn generate_snippet(tq: &TaggedQuery, t: &WebTable, m: usize, n: usize, cfg: &SnippetConfig) -> Result<Snippet> {
    if m == 0 || n == 0 {
        return Err(Error::contract("snippet dimensions must be at least 1×1"));
    }
    let hits = modifier_hits(tq, t);
    let mode = if hits.cols.iter().any(|&c| c) {
        AnswerMode::Subset
    } else {
        AnswerMode::EntireTable
    };
    let row_indices: Vec<usize> = match mode {
        AnswerMode::EntireTable => (0..t.num_rows().min(m)).collect(),
        AnswerMode::Subset => {
            let hit_rows = (0..t.num_rows()).filter(|&r| hits.rows[r]);
            let rest = (0..t.num_rows()).filter(|&r| !hits.rows[r]);
            hit_rows.chain(rest).take(m).collect()
        }
    };

    let mut cols = vec![t.subject_col];
    let add = |c: usize, cols: &mut Vec<usize>| {
        if cols.len() < n && !cols.contains(&c) {
            cols.push(c);
        }
    };
    let others: Vec<usize> = (0..t.num_cols()).filter(|&c| c != t.subject_col).collect();
    if mode == AnswerMode::Subset {
        for &c in others.iter().filter(|&&c| hits.cols[c]) {
            add(c, &mut cols);
        }
    }
    for &c in others.iter().filter(|&&c| !is_poor_column(t, c, cfg)) {
        add(c, &mut cols);
    }
    for &c in &others {
        add(c, &mut cols);
    }
    cols.sort_unstable();

    Ok(Snippet {
        mode,
        rows: row_indices
            .iter()
            .map(|&r| cols.iter().map(|&c| t.cell(r, c).to_string()).collect())
            .collect(),
        column_names: cols.iter().map(|&c| t.column_name(c).to_string()).collect(),
        row_indices,
        col_indices: cols,
        doc_title: if t.doc.title.is_empty() { t.doc.h1.clone() } else { t.doc.title.clone() },
        url: t.doc.url.clone(),
    })
}
