//! The closed vocabularies behind rule-based tagging.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::text::tokenize;

const BUNDLED_TYPES: &str = include_str!("../data/types.tsv");
const BUNDLED_SUPERLATIVES: &str = include_str!("../data/superlatives.txt");
const BUNDLED_ENTITY_NAMES: &str = include_str!("../data/entity_names.txt");

/// Identifier of an entity type, e.g. `film` or `golf_course`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeId(String);

impl TypeId {
    pub fn new(id: impl Into<String>) -> Self {
        TypeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The identifier read as words (`golf_course` → `[golf, course]`).
    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.0.replace('_', " "))
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A type name string belonging to one entity type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeName {
    pub tokens: Vec<String>,
    pub type_id: TypeId,
}

/// Maps each entity type to its unambiguous type name strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDictionary {
    entries: BTreeMap<TypeId, BTreeSet<String>>,
    names: Vec<TypeName>,
}

impl TypeDictionary {
    /// The 68-type dictionary shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TYPES, "bundled types.tsv").expect("bundled type dictionary is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    /// Parses `type_id<TAB>name1|name2|...` lines; `#` starts a comment.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (id, names) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, line_no, "expected type_id<TAB>names"))?;
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(Error::parse(source_name, line_no, format!("bad type identifier {id:?}")));
            }
            let mut parsed = Vec::new();
            for name in names.split('|') {
                if tokenize(name).is_empty() {
                    return Err(Error::parse(source_name, line_no, "empty type name string"));
                }
                parsed.push(name.to_string());
            }
            entries.push((TypeId::new(id), parsed));
        }
        Self::from_entries(entries)
    }

    /// Builds a dictionary, rejecting any name string claimed by two types.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TypeId, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut map: BTreeMap<TypeId, BTreeSet<String>> = BTreeMap::new();
        let mut owner: HashMap<String, TypeId> = HashMap::new();
        for (id, names) in entries {
            let set = map.entry(id.clone()).or_default();
            for name in names {
                let toks = tokenize(name.as_ref());
                if toks.is_empty() {
                    return Err(Error::contract(format!("type {id} has an empty name string")));
                }
                let key = toks.join(" ");
                match owner.get(&key) {
                    Some(prev) if *prev != id => {
                        return Err(Error::AmbiguousName {
                            name: key,
                            first: prev.to_string(),
                            second: id.to_string(),
                        })
                    }
                    _ => {}
                }
                owner.insert(key.clone(), id.clone());
                set.insert(key);
            }
        }
        if let Some((id, _)) = map.iter().find(|(_, names)| names.is_empty()) {
            return Err(Error::contract(format!("type {id} has no name strings")));
        }
        let names = map
            .iter()
            .flat_map(|(id, set)| {
                set.iter().map(move |n| TypeName {
                    tokens: n.split(' ').map(str::to_string).collect(),
                    type_id: id.clone(),
                })
            })
            .collect();
        Ok(TypeDictionary { entries: map, names })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &TypeId) -> bool {
        self.entries.contains_key(id)
    }

    /// Type identifiers in sorted order.
    pub fn type_ids(&self) -> impl Iterator<Item = &TypeId> {
        self.entries.keys()
    }

    pub fn names_of(&self, id: &TypeId) -> Option<&BTreeSet<String>> {
        self.entries.get(id)
    }

    /// Every name string with its owning type.
    pub fn names(&self) -> &[TypeName] {
        &self.names
    }

    /// The type owning an exact (space-joined, lowercase) name string.
    pub fn type_of_name(&self, name: &str) -> Option<&TypeId> {
        self.names
            .iter()
            .find(|n| n.tokens.join(" ") == name)
            .map(|n| &n.type_id)
    }

    /// Restricts the dictionary to the listed types.
    pub fn subset<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut entries = Vec::new();
        for id in ids {
            let id = TypeId::new(id);
            let names = self
                .entries
                .get(&id)
                .ok_or_else(|| Error::contract(format!("unknown type {id}")))?;
            entries.push((id, names.iter().cloned().collect::<Vec<_>>()));
        }
        Self::from_entries(entries)
    }
}

fn parse_phrase_lines(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| tokenize(l).join(" "))
        .filter(|l| !l.is_empty())
}

/// Keywords that open a superlative query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperlativeLexicon {
    keywords: HashSet<String>,
}

impl SuperlativeLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_SUPERLATIVES).expect("bundled superlatives are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_keywords(parse_phrase_lines(text))
    }

    pub fn from_keywords<I: IntoIterator<Item = S>, S: Into<String>>(keywords: I) -> Result<Self> {
        let keywords: HashSet<String> = keywords.into_iter().map(Into::into).collect();
        if keywords.is_empty() {
            return Err(Error::data("superlative lexicon is empty"));
        }
        Ok(SuperlativeLexicon { keywords })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.keywords.contains(token)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }
}

/// Names of individual entities, looked up on exact token sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityNameLexicon {
    names: HashSet<String>,
}

impl EntityNameLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_ENTITY_NAMES)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::parse(&read_to_string(path)?))
    }

    pub fn parse(text: &str) -> Self {
        EntityNameLexicon {
            names: parse_phrase_lines(text).collect(),
        }
    }

    pub fn from_names<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Self {
        EntityNameLexicon {
            names: names
                .into_iter()
                .map(|n| tokenize(n.as_ref()).join(" "))
                .filter(|n| !n.is_empty())
                .collect(),
        }
    }

    pub fn contains_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        let joined: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        self.names.contains(&joined.join(" "))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}
