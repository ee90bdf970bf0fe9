//! Relational web tables, their page context, and candidate pools.

mod corpus;
mod html;
mod subject;

use serde::{Deserialize, Serialize};

use crate::query::TaggedQuery;

pub use corpus::{candidate_pool, read_tables_jsonl, write_tables_jsonl, DocMeta, LocalCorpus, RetrievedDocument, SearchSource};
pub use html::{classify_relational, extract_tables, parse_raw_tables, ExtractConfig, RawTable};
pub use subject::{identify_subject_column, is_numeric, DistinctNonNumeric, SubjectColumnScorer};

/// Page-level fields shared by every table of one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentContext {
    pub doc_id: String,
    pub url: String,
    pub title: String,
    pub h1: String,
    /// 1-based rank in the search results; 0 when not retrieved by search.
    pub sr_rank: u32,
    pub static_rank: f64,
    /// Relational tables extracted from the page.
    pub num_tables_on_page: usize,
    /// Non-whitespace characters of visible page text.
    pub page_text_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WebTable {
    pub doc: DocumentContext,
    /// Position among the page's relational tables.
    pub table_index: usize,
    pub caption: String,
    pub section_heading: String,
    pub all_headings: String,
    pub surrounding_text: String,
    /// Lowercased header cells; empty when the table has no header row.
    pub column_names: Vec<String>,
    pub subject_col: usize,
    /// Body rows, rectangular.
    pub cells: Vec<Vec<String>>,
    /// Non-whitespace characters of the table's text.
    pub table_char_length: usize,
}

impl WebTable {
    pub fn num_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cells.first().map_or(self.column_names.len(), Vec::len)
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.cells[row][col]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = &str> {
        self.cells.iter().map(move |r| r[col].as_str())
    }

    /// Subject column name, or `""` without a header.
    pub fn subject_col_name(&self) -> &str {
        self.column_names.get(self.subject_col).map_or("", String::as_str)
    }

    pub fn subject_cells(&self) -> impl Iterator<Item = &str> {
        self.column(self.subject_col)
    }

    pub fn column_name(&self, col: usize) -> &str {
        self.column_names.get(col).map_or("", String::as_str)
    }

    pub fn table_importance(&self) -> f64 {
        1.0 / self.doc.num_tables_on_page.max(1) as f64
    }

    pub fn table_page_fraction(&self) -> f64 {
        if self.doc.page_text_length == 0 {
            return 0.0;
        }
        (self.table_char_length as f64 / self.doc.page_text_length as f64).min(1.0)
    }

    /// Stable `doc_id#index` reference.
    pub fn reference(&self) -> String {
        format!("{}#{}", self.doc.doc_id, self.table_index)
    }

    pub(crate) fn is_well_formed(&self) -> bool {
        let w = self.num_cols();
        !self.cells.is_empty()
            && w > 0
            && self.cells.iter().all(|r| r.len() == w)
            && (self.column_names.is_empty() || self.column_names.len() == w)
            && self.subject_col < w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub query: TaggedQuery,
    pub tables: Vec<WebTable>,
}
