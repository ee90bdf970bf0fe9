//! Queries and their tagged form.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::TypeId;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    raw_text: String,
    toks: Vec<String>,
}

impl Query {
    pub fn new(raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let toks = tokenize(&raw_text);
        Query { raw_text, toks }
    }

    /// A query over pre-split tokens; the raw text is their space-join.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        Self::new(tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" "))
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn toks(&self) -> &[String] {
        &self.toks
    }

    pub fn len(&self) -> usize {
        self.toks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.toks.is_empty()
    }

    /// Space-joined tokens; the key used by ranking files.
    pub fn normalized(&self) -> String {
        self.toks.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Intent {
    List,
    Superlative,
}

/// Half-open token range `start..end` of the phrase naming the sought type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..self.end).contains(&i)
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A query with its sought entity type and the phrase that names it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TaggedQueryRecord", into = "TaggedQueryRecord")]
pub struct TaggedQuery {
    query: Query,
    intent: Intent,
    span: Span,
    set_type: TypeId,
    confidence: f64,
}

impl TaggedQuery {
    pub fn new(query: Query, intent: Intent, span: Span, set_type: TypeId, confidence: f64) -> Result<Self> {
        if span.is_empty() || span.end > query.len() {
            return Err(Error::contract(format!(
                "span {}..{} outside query of {} tokens",
                span.start,
                span.end,
                query.len()
            )));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::contract(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(TaggedQuery {
            query,
            intent,
            span,
            set_type,
            confidence,
        })
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn toks(&self) -> &[String] {
        self.query.toks()
    }

    pub fn intent(&self) -> Intent {
        self.intent
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn set_type(&self) -> &TypeId {
        &self.set_type
    }

    /// lscore for list queries, sscore for superlative ones.
    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn pst_tokens(&self) -> &[String] {
        &self.query.toks()[self.span.range()]
    }

    pub fn pst(&self) -> String {
        self.pst_tokens().join(" ")
    }

    pub fn premod(&self) -> &[String] {
        &self.query.toks()[..self.span.start]
    }

    pub fn postmod(&self) -> &[String] {
        &self.query.toks()[self.span.end..]
    }

    /// Premodifier tokens followed by postmodifier tokens.
    pub fn modifier_tokens(&self) -> impl Iterator<Item = &String> {
        self.premod().iter().chain(self.postmod())
    }
}

#[derive(Serialize, Deserialize)]
struct TaggedQueryRecord {
    query: String,
    toks: Vec<String>,
    intent: Intent,
    pst: String,
    pst_span: Span,
    set_type: TypeId,
    confidence: f64,
    premod: Vec<String>,
    postmod: Vec<String>,
}

impl From<TaggedQuery> for TaggedQueryRecord {
    fn from(tq: TaggedQuery) -> Self {
        TaggedQueryRecord {
            pst: tq.pst(),
            premod: tq.premod().to_vec(),
            postmod: tq.postmod().to_vec(),
            toks: tq.query.toks.clone(),
            pst_span: tq.span,
            intent: tq.intent,
            confidence: tq.confidence,
            set_type: tq.set_type,
            query: tq.query.raw_text,
        }
    }
}

impl TryFrom<TaggedQueryRecord> for TaggedQuery {
    type Error = Error;

    fn try_from(rec: TaggedQueryRecord) -> Result<Self> {
        let query = Query::new(rec.query);
        if query.toks != rec.toks {
            return Err(Error::data("tagged query tokens do not match its text"));
        }
        TaggedQuery::new(query, rec.intent, rec.pst_span, rec.set_type, rec.confidence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(text: &str, span: Span) -> TaggedQuery {
        TaggedQuery::new(Query::new(text), Intent::List, span, TypeId::new("film"), 1.0).unwrap()
    }

    #[test]
    fn modifiers_reconstruct_tokens() {
        let tq = tagged("best tom cruise movies of 2017", Span::new(3, 4));
        assert_eq!(tq.pst(), "movies");
        assert_eq!(tq.premod(), ["best", "tom", "cruise"]);
        assert_eq!(tq.postmod(), ["of", "2017"]);
        let rebuilt: Vec<&String> = tq.premod().iter().chain(tq.pst_tokens()).chain(tq.postmod()).collect();
        assert_eq!(rebuilt, tq.toks().iter().collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_spans_and_confidence() {
        let q = Query::new("tom cruise movies");
        let film = TypeId::new("film");
        assert!(TaggedQuery::new(q.clone(), Intent::List, Span::new(2, 4), film.clone(), 0.5).is_err());
        assert!(TaggedQuery::new(q.clone(), Intent::List, Span::new(1, 1), film.clone(), 0.5).is_err());
        assert!(TaggedQuery::new(q, Intent::List, Span::new(2, 3), film, 1.5).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let tq = tagged("tom cruise movies", Span::new(2, 3));
        let json = serde_json::to_string(&tq).unwrap();
        assert!(json.contains("\"pst\":\"movies\""));
        let back: TaggedQuery = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tq);
    }
}
