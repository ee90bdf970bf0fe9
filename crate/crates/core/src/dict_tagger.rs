//! Dictionary-lookup taggers: TDL, TDL+ER and TDL+ER+DP.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lexicon::{EntityNameLexicon, SuperlativeLexicon, TypeDictionary, TypeName};
use crate::query::{Intent, Query, Span, TaggedQuery};
use crate::text::{is_plural_of, singularize};

pub const DEFAULT_PREPOSITIONS: &[&str] = &[
    "in", "of", "for", "with", "at", "on", "to", "near", "by", "from", "under", "over", "about",
];

/// External head finder, e.g. a dependency parser, returning the index of
/// the root token.
pub trait HeadFinder: Send + Sync {
    fn root(&self, toks: &[String]) -> Result<usize, String>;
}

/// Decides whether the detected phrase is the head of the query.
#[derive(Clone)]
pub struct RootCheckRule {
    prepositions: HashSet<String>,
    parser_hook: Option<Arc<dyn HeadFinder>>,
}

impl fmt::Debug for RootCheckRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RootCheckRule")
            .field("prepositions", &self.prepositions.len())
            .field("parser_hook", &self.parser_hook.is_some())
            .finish()
    }
}

impl Default for RootCheckRule {
    fn default() -> Self {
        RootCheckRule::new(DEFAULT_PREPOSITIONS.iter().copied()).expect("default prepositions")
    }
}

impl RootCheckRule {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(prepositions: I) -> crate::Result<Self> {
        let prepositions: HashSet<String> = prepositions.into_iter().map(Into::into).collect();
        if prepositions.is_empty() {
            return Err(Error::config("root check needs at least one preposition"));
        }
        Ok(RootCheckRule {
            prepositions,
            parser_hook: None,
        })
    }

    pub fn with_parser(mut self, hook: Arc<dyn HeadFinder>) -> Self {
        self.parser_hook = Some(hook);
        self
    }

    pub fn is_preposition(&self, tok: &str) -> bool {
        self.prepositions.contains(tok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    None,
    NoDictHit,
    EntityName,
    NotRoot,
}

impl RejectionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectionReason::None => "none",
            RejectionReason::NoDictHit => "no_dict_hit",
            RejectionReason::EntityName => "entity_name",
            RejectionReason::NotRoot => "not_root",
        }
    }
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootCheck {
    pub passes: bool,
    /// The parser hook failed and the preposition rule decided instead.
    pub hook_failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggingOutcome {
    pub tagged: Option<TaggedQuery>,
    pub reason: RejectionReason,
    pub hook_failed: bool,
}

impl TaggingOutcome {
    fn accepted(tq: TaggedQuery, hook_failed: bool) -> Self {
        TaggingOutcome {
            tagged: Some(tq),
            reason: RejectionReason::None,
            hook_failed,
        }
    }

    fn rejected(reason: RejectionReason, hook_failed: bool) -> Self {
        TaggingOutcome {
            tagged: None,
            reason,
            hook_failed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineMode {
    Tdl,
    TdlEr,
    TdlErDp,
}

impl FromStr for BaselineMode {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tdl" => Ok(BaselineMode::Tdl),
            "tdl-er" | "tdl+er" => Ok(BaselineMode::TdlEr),
            "tdl-er-dp" | "tdl+er+dp" => Ok(BaselineMode::TdlErDp),
            other => Err(Error::config(format!("unknown baseline mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Plural,
    Singular,
}

fn match_form(toks: &[String], at: usize, name: &TypeName) -> Option<Form> {
    let n = name.tokens.len();
    if at + n > toks.len() {
        return None;
    }
    let (head, last) = name.tokens.split_at(n - 1);
    if toks[at..at + n - 1] != *head {
        return None;
    }
    let tok = &toks[at + n - 1];
    if *tok == last[0] {
        Some(Form::Singular)
    } else if is_plural_of(tok, &last[0]) {
        Some(Form::Plural)
    } else {
        None
    }
}

/// Longest, then leftmost, occurrence of a dictionary name in `form`.
fn best_match<'a>(toks: &[String], td: &'a TypeDictionary, form: Form) -> Option<(Span, &'a TypeName)> {
    let mut best: Option<(Span, &TypeName)> = None;
    for name in td.names() {
        for at in 0..toks.len() {
            if match_form(toks, at, name) != Some(form) {
                continue;
            }
            let span = Span::new(at, at + name.tokens.len());
            let better = match best {
                None => true,
                Some((b, _)) => span.len() > b.len() || (span.len() == b.len() && span.start < b.start),
            };
            if better {
                best = Some((span, name));
            }
        }
    }
    best
}

/// Type dictionary lookup.
///
/// A name in plural form makes a list query; a name in singular form plus a
/// leading superlative keyword makes a superlative query. Confidence is 1.
pub fn tdl_tag(q: &Query, td: &TypeDictionary, sl: &SuperlativeLexicon) -> Option<TaggedQuery> {
    let toks = q.toks();
    if toks.is_empty() {
        return None;
    }
    let (intent, (span, name)) = if let Some(hit) = best_match(toks, td, Form::Plural) {
        (Intent::List, hit)
    } else if sl.contains(&toks[0]) {
        (Intent::Superlative, best_match(toks, td, Form::Singular)?)
    } else {
        return None;
    };
    TaggedQuery::new(q.clone(), intent, span, name.type_id.clone(), 1.0).ok()
}

/// Passes unless some contiguous substring covering the whole phrase is an
/// entity name.
pub fn entity_name_check(tq: &TaggedQuery, el: &EntityNameLexicon) -> bool {
    let toks = tq.toks();
    let span = tq.span();
    for start in 0..=span.start {
        for end in span.end..=toks.len() {
            if el.contains_tokens(&toks[start..end]) {
                return false;
            }
        }
    }
    true
}

fn looks_plural(tok: &str) -> bool {
    !tok.chars().all(|c| c.is_ascii_digit()) && singularize(tok) != tok
}

fn rule_root_check(toks: &[String], span: Span, rule: &RootCheckRule) -> bool {
    if span.start > 0 && rule.is_preposition(&toks[span.start - 1]) {
        return false;
    }
    for tok in &toks[span.end..] {
        if rule.is_preposition(tok) {
            break;
        }
        if looks_plural(tok) {
            return false;
        }
    }
    true
}

/// Whether the detected phrase is the head word of the query.
///
/// With a parser hook the hook's root must fall in the span. Without one,
/// the phrase fails when a preposition directly precedes it or when a
/// plural noun follows it before any preposition.
pub fn root_check(tq: &TaggedQuery, rule: &RootCheckRule) -> RootCheck {
    let mut hook_failed = false;
    if let Some(hook) = &rule.parser_hook {
        match hook.root(tq.toks()) {
            Ok(root) => {
                return RootCheck {
                    passes: tq.span().contains(root),
                    hook_failed: false,
                }
            }
            Err(msg) => {
                log::warn!("parser hook failed on {:?}: {msg}; using preposition rule", tq.query().raw_text());
                hook_failed = true;
            }
        }
    }
    RootCheck {
        passes: rule_root_check(tq.toks(), tq.span(), rule),
        hook_failed,
    }
}

/// TDL followed by entity name removal.
pub fn tdl_er_tag(q: &Query, td: &TypeDictionary, sl: &SuperlativeLexicon, el: &EntityNameLexicon) -> TaggingOutcome {
    match tdl_tag(q, td, sl) {
        None => TaggingOutcome::rejected(RejectionReason::NoDictHit, false),
        Some(tq) if !entity_name_check(&tq, el) => TaggingOutcome::rejected(RejectionReason::EntityName, false),
        Some(tq) => TaggingOutcome::accepted(tq, false),
    }
}

/// TDL, then entity name removal, then the root check.
pub fn tdl_er_dp_tag(
    q: &Query,
    td: &TypeDictionary,
    sl: &SuperlativeLexicon,
    el: &EntityNameLexicon,
    rule: &RootCheckRule,
) -> TaggingOutcome {
    let outcome = tdl_er_tag(q, td, sl, el);
    let Some(tq) = outcome.tagged else {
        return outcome;
    };
    let check = root_check(&tq, rule);
    if check.passes {
        TaggingOutcome::accepted(tq, check.hook_failed)
    } else {
        TaggingOutcome::rejected(RejectionReason::NotRoot, check.hook_failed)
    }
}

/// The three baseline taggers over one set of lexicons.
#[derive(Debug, Clone)]
pub struct BaselineTagger {
    pub types: TypeDictionary,
    pub superlatives: SuperlativeLexicon,
    pub entities: EntityNameLexicon,
    pub rule: RootCheckRule,
}

impl BaselineTagger {
    pub fn bundled() -> Self {
        BaselineTagger {
            types: TypeDictionary::bundled(),
            superlatives: SuperlativeLexicon::bundled(),
            entities: EntityNameLexicon::bundled(),
            rule: RootCheckRule::default(),
        }
    }

    pub fn tag(&self, mode: BaselineMode, q: &Query) -> TaggingOutcome {
        match mode {
            BaselineMode::Tdl => match tdl_tag(q, &self.types, &self.superlatives) {
                Some(tq) => TaggingOutcome::accepted(tq, false),
                None => TaggingOutcome::rejected(RejectionReason::NoDictHit, false),
            },
            BaselineMode::TdlEr => tdl_er_tag(q, &self.types, &self.superlatives, &self.entities),
            BaselineMode::TdlErDp => tdl_er_dp_tag(q, &self.types, &self.superlatives, &self.entities, &self.rule),
        }
    }
}
