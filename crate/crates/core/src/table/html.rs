use std::collections::{BTreeMap, BTreeSet};

use scraper::{ElementRef, Html, Node};
use serde::{Deserialize, Serialize};

use super::subject::{is_numeric, SubjectColumnScorer};
use super::{DocumentContext, WebTable};
use crate::error::{Error, Result};

const MAX_SPAN: usize = 64;
const BLOCKS: [&str; 7] = ["p", "div", "blockquote", "li", "dd", "pre", "section"];
const INVISIBLE: [&str; 4] = ["script", "style", "noscript", "template"];

/// Thresholds of the relational-table heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub min_rows: usize,
    pub min_cols: usize,
    pub max_empty_ratio: f64,
    /// Largest allowed colspan as a fraction of the row width.
    pub max_span_fraction: f64,
    /// At least one column must reach this distinct-value ratio.
    pub min_distinct_ratio: f64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            min_rows: 2,
            min_cols: 2,
            max_empty_ratio: 0.5,
            max_span_fraction: 0.5,
            min_distinct_ratio: 0.8,
        }
    }
}

/// A `<table>` flattened to a rectangular grid, spans duplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub caption: String,
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
    /// Widest colspan seen, in columns.
    pub max_colspan: usize,
    pub char_length: usize,
}

impl RawTable {
    pub fn width(&self) -> usize {
        self.rows
            .first()
            .or(self.header.as_ref())
            .map_or(0, Vec::len)
    }
}

/// Rows ≥ `min_rows`, columns ≥ `min_cols`, few empty cells, no dominant
/// spanning cell, and at least one near-unique column.
pub fn classify_relational(t: &RawTable, cfg: &ExtractConfig) -> bool {
    let (rows, cols) = (t.rows.len(), t.width());
    if rows < cfg.min_rows || cols < cfg.min_cols {
        return false;
    }
    let empty = t.rows.iter().flatten().filter(|c| c.trim().is_empty()).count();
    if empty as f64 > cfg.max_empty_ratio * (rows * cols) as f64 {
        return false;
    }
    if t.max_colspan as f64 > cfg.max_span_fraction * cols as f64 {
        return false;
    }
    (0..cols).any(|c| {
        let distinct: BTreeSet<String> = t
            .rows
            .iter()
            .map(|r| r[c].trim().to_lowercase())
            .filter(|v| !v.is_empty())
            .collect();
        distinct.len() as f64 >= cfg.min_distinct_ratio * rows as f64
    })
}

struct Cell {
    text: String,
    is_th: bool,
    colspan: usize,
    rowspan: usize,
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn name<'a>(el: &ElementRef<'a>) -> &'a str {
    el.value().name()
}

fn visible_text(el: ElementRef) -> String {
    let mut out = String::new();
    for node in el.descendants() {
        if let Node::Text(t) = node.value() {
            let hidden = node
                .ancestors()
                .filter_map(ElementRef::wrap)
                .any(|a| INVISIBLE.contains(&name(&a)));
            if !hidden {
                out.push_str(t);
            }
        }
    }
    collapse(&out)
}

fn non_ws_len(s: &str) -> usize {
    s.chars().filter(|c| !c.is_whitespace()).count()
}

fn child_elements<'a>(el: ElementRef<'a>) -> impl Iterator<Item = ElementRef<'a>> {
    el.children().filter_map(ElementRef::wrap)
}

fn span_attr(el: &ElementRef, attr: &str) -> usize {
    el.value()
        .attr(attr)
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(1)
        .clamp(1, MAX_SPAN)
}

/// `<tr>` rows belonging to `table` itself, with whether they sit in `<thead>`.
fn direct_rows(table: ElementRef<'_>) -> Vec<(ElementRef<'_>, bool)> {
    let mut rows = Vec::new();
    for child in child_elements(table) {
        match name(&child) {
            "tr" => rows.push((child, false)),
            "thead" | "tbody" | "tfoot" => {
                let head = name(&child) == "thead";
                rows.extend(child_elements(child).filter(|r| name(r) == "tr").map(|r| (r, head)));
            }
            _ => {}
        }
    }
    rows
}

fn parse_table(table: ElementRef<'_>) -> RawTable {
    let caption = child_elements(table)
        .find(|c| name(c) == "caption")
        .map(visible_text)
        .unwrap_or_default();
    let rows = direct_rows(table);
    let mut grid: Vec<Vec<(String, bool)>> = Vec::new();
    let mut carry: BTreeMap<usize, (String, bool, usize)> = BTreeMap::new();
    let mut max_colspan = 1;
    let mut thead_rows = 0;
    for (i, (tr, in_head)) in rows.iter().enumerate() {
        if *in_head && i == thead_rows {
            thead_rows += 1;
        }
        let cells: Vec<Cell> = child_elements(*tr)
            .filter(|c| matches!(name(c), "td" | "th"))
            .map(|c| Cell {
                text: visible_text(c),
                is_th: name(&c) == "th",
                colspan: span_attr(&c, "colspan"),
                rowspan: span_attr(&c, "rowspan"),
            })
            .collect();
        let mut out: Vec<(String, bool)> = Vec::new();
        let mut col = 0;
        let take_carry = |col: &mut usize, out: &mut Vec<(String, bool)>, carry: &mut BTreeMap<usize, (String, bool, usize)>| {
            while let Some((text, th, left)) = carry.get_mut(col) {
                out.push((text.clone(), *th));
                *left -= 1;
                if *left == 0 {
                    carry.remove(col);
                }
                *col += 1;
            }
        };
        for cell in cells {
            take_carry(&mut col, &mut out, &mut carry);
            max_colspan = max_colspan.max(cell.colspan);
            for _ in 0..cell.colspan {
                out.push((cell.text.clone(), cell.is_th));
                if cell.rowspan > 1 {
                    carry.insert(col, (cell.text.clone(), cell.is_th, cell.rowspan - 1));
                }
                col += 1;
            }
        }
        while let Some(&next) = carry.keys().find(|&&k| k >= col) {
            while col < next {
                out.push((String::new(), false));
                col += 1;
            }
            take_carry(&mut col, &mut out, &mut carry);
        }
        grid.push(out);
    }
    grid.retain(|r| !r.is_empty());
    let width = grid.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut grid {
        r.resize(width, (String::new(), false));
    }

    let header_is_th = grid.first().is_some_and(|r| r.iter().all(|(_, th)| *th));
    let header = if thead_rows > 0 || header_is_th || first_row_looks_like_header(&grid) {
        Some(grid.remove(0).into_iter().map(|(t, _)| t.to_lowercase()).collect())
    } else {
        None
    };
    RawTable {
        caption,
        header,
        rows: grid.into_iter().map(|r| r.into_iter().map(|(t, _)| t).collect()).collect(),
        max_colspan,
        char_length: non_ws_len(&visible_text(table)),
    }
}

/// A first row of non-empty labels above at least one numeric-majority
/// column counts as a header.
fn first_row_looks_like_header(grid: &[Vec<(String, bool)>]) -> bool {
    let Some((first, body)) = grid.split_first() else {
        return false;
    };
    if body.is_empty() || first.iter().any(|(t, _)| t.is_empty() || is_numeric(t)) {
        return false;
    }
    (0..first.len()).any(|c| {
        let vals: Vec<&str> = body.iter().map(|r| r[c].0.as_str()).filter(|v| !v.is_empty()).collect();
        !vals.is_empty() && 2 * vals.iter().filter(|v| is_numeric(v)).count() > vals.len()
    })
}

struct TableSite<'a> {
    element: ElementRef<'a>,
    headings: Vec<(u8, String)>,
    preceding_block: String,
}

fn heading_level(tag: &str) -> Option<u8> {
    match tag.as_bytes() {
        [b'h', d @ b'1'..=b'6'] => Some(d - b'0'),
        _ => None,
    }
}

fn walk(doc: &Html) -> Vec<TableSite<'_>> {
    let mut stack: Vec<(u8, String)> = Vec::new();
    let mut last_block = String::new();
    let mut sites = Vec::new();
    for node in doc.root_element().descendants() {
        let Some(el) = ElementRef::wrap(node) else {
            continue;
        };
        let tag = name(&el);
        let in_table = el.ancestors().filter_map(ElementRef::wrap).any(|a| name(&a) == "table");
        if tag == "table" {
            sites.push(TableSite {
                element: el,
                headings: stack.clone(),
                preceding_block: last_block.clone(),
            });
            continue;
        }
        if in_table {
            continue;
        }
        if let Some(level) = heading_level(tag) {
            stack.retain(|(l, _)| *l < level);
            stack.push((level, visible_text(el)));
        } else if BLOCKS.contains(&tag) {
            let holds_table = el.descendants().filter_map(ElementRef::wrap).any(|d| name(&d) == "table");
            let text = visible_text(el);
            if !holds_table && !text.is_empty() {
                last_block = text;
            }
        }
    }
    sites
}

/// Parses raw grids of every `<table>` element, relational or not.
pub fn parse_raw_tables(html: &str) -> Vec<RawTable> {
    let doc = Html::parse_document(html);
    walk(&doc).into_iter().map(|s| parse_table(s.element)).collect()
}

/// Extracts the relational tables of one page. Fields of `base` left empty
/// (`title`, `h1`) are filled from the page; table counts and page length
/// are always computed.
pub fn extract_tables(
    html: &[u8],
    base: &DocumentContext,
    cfg: &ExtractConfig,
    scorer: &dyn SubjectColumnScorer,
) -> Result<Vec<WebTable>> {
    let text = std::str::from_utf8(html).map_err(|e| Error::Document {
        doc: base.doc_id.clone(),
        message: format!("not valid UTF-8: {e}"),
    })?;
    let doc = Html::parse_document(text);
    let first = |tag: &str| {
        doc.root_element()
            .descendants()
            .filter_map(ElementRef::wrap)
            .find(|e| name(e) == tag)
            .map(visible_text)
            .unwrap_or_default()
    };
    let mut ctx = base.clone();
    if ctx.title.is_empty() {
        ctx.title = first("title");
    }
    if ctx.h1.is_empty() {
        ctx.h1 = first("h1");
    }
    let body = doc
        .root_element()
        .descendants()
        .filter_map(ElementRef::wrap)
        .find(|e| name(e) == "body")
        .unwrap_or(doc.root_element());
    ctx.page_text_length = non_ws_len(&visible_text(body));

    let mut tables = Vec::new();
    for site in walk(&doc) {
        let raw = parse_table(site.element);
        if !classify_relational(&raw, cfg) {
            continue;
        }
        let section_heading = site
            .headings
            .iter()
            .rev()
            .find(|(l, _)| (2..=4).contains(l))
            .map(|(_, t)| t.clone())
            .unwrap_or_default();
        let mut heads: Vec<&str> = site.headings.iter().map(|(_, t)| t.as_str()).collect();
        if !site.headings.iter().any(|(l, _)| *l == 1) && !ctx.h1.is_empty() {
            heads.insert(0, &ctx.h1);
        }
        let all_headings = heads.into_iter().filter(|h| !h.is_empty()).collect::<Vec<_>>().join(" ");
        let column_names = raw.header.clone().unwrap_or_default();
        let subject_col = scorer.subject_column(&column_names, &raw.rows);
        tables.push(WebTable {
            doc: ctx.clone(),
            table_index: tables.len(),
            caption: raw.caption,
            section_heading,
            all_headings,
            surrounding_text: site.preceding_block,
            column_names,
            subject_col,
            cells: raw.rows,
            table_char_length: raw.char_length,
        });
    }
    let n = tables.len();
    for t in &mut tables {
        t.doc.num_tables_on_page = n;
    }
    Ok(tables)
}
