mod common;

use common::fixtures;
use proptest::prelude::*;
use tableqna::table::{
    candidate_pool, classify_relational, extract_tables, identify_subject_column, parse_raw_tables, read_tables_jsonl, write_tables_jsonl,
    DistinctNonNumeric, DocumentContext, ExtractConfig, RawTable, WebTable,
};
use tableqna::text::{cont, tokenize};

fn blank_doc() -> DocumentContext {
    DocumentContext {
        doc_id: "d".into(),
        url: "https://example.org/d".into(),
        title: String::new(),
        h1: String::new(),
        sr_rank: 1,
        static_rank: 0.5,
        num_tables_on_page: 0,
        page_text_length: 0,
    }
}

fn extract(html: &str) -> Vec<WebTable> {
    extract_tables(html.as_bytes(), &blank_doc(), &ExtractConfig::default(), &DistinctNonNumeric).unwrap()
}

fn raw(rows: &[&[&str]]) -> RawTable {
    RawTable {
        caption: String::new(),
        header: None,
        rows: rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
        max_colspan: 1,
        char_length: 0,
    }
}

fn check_invariants(t: &WebTable) {
    assert!(t.num_rows() >= 1);
    assert!(t.cells.iter().all(|r| r.len() == t.num_cols()), "ragged grid in {}", t.reference());
    assert!(t.column_names.is_empty() || t.column_names.len() == t.num_cols());
    assert!(t.subject_col < t.num_cols());
    let sec = tokenize(&t.section_heading);
    if !sec.is_empty() {
        assert!(cont(&tokenize(&t.all_headings), &sec).unwrap(), "{}: {:?} not in {:?}", t.reference(), t.section_heading, t.all_headings);
    }
    let imp = t.table_importance();
    assert!(imp > 0.0 && imp <= 1.0);
    assert_eq!(imp, 1.0 / t.doc.num_tables_on_page as f64);
    let frac = t.table_page_fraction();
    assert!(frac > 0.0 && frac <= 1.0, "{}: page fraction {frac}", t.reference());
}

#[test]
fn single_table_movie_page() {
    let html = std::fs::read_to_string(fixtures::path("pages/tom_cruise_movies.html")).unwrap();
    let tables = extract(&html);
    assert_eq!(tables.len(), 1);
    let t = &tables[0];
    assert_eq!(t.column_names, ["year", "movie", "role"]);
    assert_eq!(t.subject_col, 1);
    assert_eq!(t.doc.title, "Tom Cruise Movies");
    assert_eq!(t.doc.h1, "Tom Cruise Movies");
    assert_eq!(t.caption, "");
    assert_eq!(t.section_heading, "Filmography");
    assert_eq!(t.num_rows(), 10);
    check_invariants(t);
}

#[test]
fn layout_strip_is_not_relational() {
    let tables = extract("<table><tr><td>Home</td><td>News</td><td>Sports</td><td>Weather</td><td>Video</td><td>Shop</td><td>Help</td><td>Login</td></tr></table>");
    assert!(tables.is_empty());
}

#[test]
fn classifier_examples() {
    let cfg = ExtractConfig::default();
    let r = raw(&[&["a", "1", "x"], &["b", "2", "y"], &["c", "3", "z"], &["d", "4", "w"], &["e", "5", "v"]]);
    assert!(classify_relational(&r, &cfg));
    let strip = raw(&[&["1", "2", "3", "4", "5", "6", "7", "8"]]);
    assert!(!classify_relational(&strip, &cfg));
    let sparse = raw(&[&["a", ""], &["", ""], &["c", ""], &["", "x"]]);
    let empty = sparse.rows.iter().flatten().filter(|c| c.is_empty()).count();
    assert!(empty as f64 / 8.0 > 0.5);
    assert!(!classify_relational(&sparse, &cfg));
}

#[test]
fn wide_colspan_rejects_table() {
    let html = "<table><tr><th>A</th><th>B</th><th>C</th></tr>\
        <tr><td colspan=\"3\">banner</td></tr><tr><td>x</td><td>1</td><td>2</td></tr><tr><td>y</td><td>3</td><td>4</td></tr></table>";
    assert!(extract(html).is_empty());
    let raw = &parse_raw_tables(html)[0];
    assert_eq!(raw.max_colspan, 3);
    assert!(raw.rows.iter().all(|r| r.len() == 3));
}

#[test]
fn rowspan_duplicates_values() {
    let html = "<table><tr><th>Country</th><th>City</th></tr>\
        <tr><td rowspan=\"2\">France</td><td>Paris</td></tr><tr><td>Lyon</td></tr>\
        <tr><td>Spain</td><td>Madrid</td></tr></table>";
    let t = &extract(html)[0];
    assert_eq!(t.cells, vec![vec!["France", "Paris"], vec!["France", "Lyon"], vec!["Spain", "Madrid"]]);
    assert_eq!(t.subject_col, 1);
}

#[test]
fn subject_column_rules() {
    let names: Vec<String> = vec!["a".into(), "b".into()];
    let cells = vec![vec!["x".to_string(), "p".to_string()], vec!["y".into(), "q".into()]];
    assert_eq!(identify_subject_column(&names, &cells), 0);
    let single = vec![vec!["only".to_string()], vec!["one".into()]];
    assert_eq!(identify_subject_column(&names[..1], &single), 0);
    let numeric = vec![vec!["1".to_string(), "2".to_string()], vec!["3".into(), "4".into()]];
    assert_eq!(identify_subject_column(&names, &numeric), 0);
}

#[test]
fn headings_and_context() {
    let html = "<html><head><title>Lakes</title></head><body><h1>Lakes of Oregon</h1>\
        <h2>Cascades</h2><h3>Large lakes</h3><p>The biggest ones.</p>\
        <table><tr><th>Lake</th><th>Area</th></tr><tr><td>Crater Lake</td><td>53</td></tr><tr><td>Waldo Lake</td><td>40</td></tr></table>\
        <h2>Coast</h2><table><caption>Coastal</caption><tr><th>Lake</th><th>Area</th></tr><tr><td>Devils Lake</td><td>2</td></tr><tr><td>Siltcoos Lake</td><td>12</td></tr></table>\
        </body></html>";
    let ts = extract(html);
    assert_eq!(ts.len(), 2);
    assert_eq!(ts[0].section_heading, "Large lakes");
    assert_eq!(ts[0].all_headings, "Lakes of Oregon Cascades Large lakes");
    assert_eq!(ts[0].surrounding_text, "The biggest ones.");
    assert_eq!(ts[0].caption, "");
    assert_eq!(ts[1].section_heading, "Coast");
    assert_eq!(ts[1].all_headings, "Lakes of Oregon Coast");
    assert_eq!(ts[1].caption, "Coastal");
    assert_eq!(ts[1].doc.title, "Lakes");
    assert_eq!(ts[1].doc.num_tables_on_page, 2);
    ts.iter().for_each(check_invariants);
}

#[test]
fn invalid_utf8_is_a_document_error() {
    let err = extract_tables(&[0xff, 0xfe, 0x00], &blank_doc(), &ExtractConfig::default(), &DistinctNonNumeric).unwrap_err();
    assert!(matches!(err, tableqna::Error::Document { .. }), "{err:?}");
}

#[test]
fn corpus_tables_satisfy_invariants_and_are_deterministic() {
    let a = fixtures::corpus_tables();
    let b = fixtures::corpus_tables();
    assert_eq!(a, b);
    assert!(a.len() >= 40);
    a.iter().for_each(check_invariants);
    let mut buf = Vec::new();
    write_tables_jsonl(&mut buf, &a).unwrap();
    assert_eq!(read_tables_jsonl(&buf[..]).unwrap(), a);
}

#[test]
fn candidate_pool_follows_ranking() {
    let corpus = fixtures::corpus();
    let tq = fixtures::tom_cruise_movies("");
    let cfg = ExtractConfig::default();
    let pool = candidate_pool(&tq, &corpus, 5, &cfg, &DistinctNonNumeric).unwrap();
    let refs: Vec<String> = pool.tables.iter().map(WebTable::reference).collect();
    assert_eq!(refs, ["tom-cruise-movies#0", "tom-cruise-movies#1", "tom-cruise-biography#0"]);
    assert_eq!(pool.tables.iter().map(|t| t.doc.sr_rank).collect::<Vec<_>>(), [1, 1, 2]);
    let top = candidate_pool(&tq, &corpus, 1, &cfg, &DistinctNonNumeric).unwrap();
    assert!(top.tables.iter().all(|t| t.doc.doc_id == "tom-cruise-movies"));
    let unknown = fixtures::tom_cruise_movies("unranked ");
    assert!(candidate_pool(&unknown, &corpus, 5, &cfg, &DistinctNonNumeric).unwrap().tables.is_empty());
}

fn arb_cell() -> impl Strategy<Value = String> {
    prop_oneof![Just(String::new()), "[a-z]{1,6}", "[0-9]{1,4}", "[A-Z][a-z]{2,5} [A-Z][a-z]{2,5}"]
}

fn arb_table_html() -> impl Strategy<Value = String> {
    (1usize..5, 1usize..7).prop_flat_map(|(cols, rows)| {
        (
            proptest::collection::vec(arb_cell(), cols),
            proptest::collection::vec(proptest::collection::vec((arb_cell(), 1usize..3, 1usize..3), 1..=cols), rows),
            any::<bool>(),
        )
            .prop_map(|(header, body, with_th)| {
                let mut html = String::from("<html><body><h1>Top</h1><h2>Section</h2><p>Intro text.</p><table>");
                if with_th {
                    html.push_str("<tr>");
                    header.iter().for_each(|h| html.push_str(&format!("<th>{h}</th>")));
                    html.push_str("</tr>");
                }
                for row in body {
                    html.push_str("<tr>");
                    for (c, rs, cs) in row {
                        html.push_str(&format!("<td rowspan=\"{rs}\" colspan=\"{cs}\">{c}</td>"));
                    }
                    html.push_str("</tr>");
                }
                html.push_str("</table></body></html>");
                html
            })
    })
}

proptest! {
    #[test]
    fn extracted_tables_are_rectangular_and_deterministic(html in arb_table_html()) {
        let a = extract(&html);
        let b = extract(&html);
        prop_assert_eq!(&a, &b);
        for t in &a {
            check_invariants(t);
        }
        for r in parse_raw_tables(&html) {
            let w = r.width();
            prop_assert!(r.rows.iter().all(|row| row.len() == w));
        }
    }
}
