//! Tokenization, plural folding and the token containment primitive.

use crate::error::{Error, Result};

/// Lowercase word tokens of `raw`, split on whitespace and punctuation.
///
/// Punctuation is dropped. Whitespace-only input yields no tokens.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(|piece| piece.to_lowercase())
        .collect()
}

const IRREGULAR: &[(&str, &str)] = &[
    ("people", "person"),
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("mice", "mouse"),
    ("geese", "goose"),
];

const UNCHANGED: &[&str] = &["series", "species", "news", "sports", "olympics"];

// Nouns whose singular ends in "ie", so "-ies" must not become "-y".
const IE_SINGULARS: &[&str] = &[
    "movie", "cookie", "zombie", "calorie", "brownie", "rookie", "selfie", "pie", "tie", "lie",
    "genie", "hippie", "smoothie", "prairie", "goalie", "auntie", "birdie", "indie", "newbie",
];

/// Folds an English plural to its singular form.
///
/// Applies an irregular table and a suffix cascade. Singular forms and
/// unknown shapes come back unchanged, so the function is idempotent.
pub fn singularize(token: &str) -> String {
    if let Some(&(_, singular)) = IRREGULAR.iter().find(|(plural, _)| *plural == token) {
        return singular.to_string();
    }
    if token.chars().count() <= 3 || UNCHANGED.contains(&token) {
        return token.to_string();
    }
    if token.ends_with("ss") || token.ends_with("us") || token.ends_with("is") {
        return token.to_string();
    }
    if let Some(stem) = token.strip_suffix("ies") {
        let ie = format!("{stem}ie");
        if IE_SINGULARS.contains(&ie.as_str()) {
            return ie;
        }
        return format!("{stem}y");
    }
    for suffix in ["sses", "xes", "zes", "ches", "shes"] {
        if token.ends_with(suffix) {
            return token[..token.len() - 2].to_string();
        }
    }
    if let Some(stem) = token.strip_suffix('s') {
        return stem.to_string();
    }
    token.to_string()
}

/// True when `token` is a plural spelling of the singular `base`.
pub fn is_plural_of(token: &str, base: &str) -> bool {
    token != base && singularize(token) == base
}

/// Singular-folded copies of `tokens`, the form compared by [`cont`].
pub fn fold<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens.iter().map(|t| singularize(t.as_ref())).collect()
}

/// Order-preserving subsequence test on already folded tokens.
pub fn cont_folded<S: AsRef<str>, T: AsRef<str>>(s: &[S], t: &[T]) -> bool {
    let mut pending = t.iter().peekable();
    for tok in s {
        match pending.peek() {
            Some(want) if want.as_ref() == tok.as_ref() => {
                pending.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    pending.peek().is_none()
}

/// Whether the tokens of `s` contain the tokens of `t` as a subsequence.
///
/// Matching is order-preserving, need not be contiguous, and treats a
/// token and its plural as equal. An empty `t` is a contract violation.
pub fn cont<S: AsRef<str>, T: AsRef<str>>(s: &[S], t: &[T]) -> Result<bool> {
    if t.is_empty() {
        return Err(Error::contract("cont: contained token list must be non-empty"));
    }
    Ok(cont_folded(&fold(s), &fold(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Tom Cruise movies"), ["tom", "cruise", "movies"]);
        assert_eq!(
            tokenize("largest city in california"),
            ["largest", "city", "in", "california"]
        );
        assert!(tokenize("   ").is_empty());
        assert_eq!(tokenize("Mission: Impossible – Rogue Nation"), ["mission", "impossible", "rogue", "nation"]);
    }

    #[test]
    fn singularize_examples() {
        assert_eq!(singularize("cities"), "city");
        assert_eq!(singularize("films"), "film");
        assert_eq!(singularize("film"), "film");
        assert_eq!(singularize("movies"), "movie");
        assert_eq!(singularize("churches"), "church");
        assert_eq!(singularize("courses"), "course");
        assert_eq!(singularize("glasses"), "glass");
        assert_eq!(singularize("people"), "person");
        assert_eq!(singularize("children"), "child");
        assert_eq!(singularize("campus"), "campus");
        assert_eq!(singularize("series"), "series");
    }

    #[test]
    fn plural_detection() {
        assert!(is_plural_of("films", "film"));
        assert!(!is_plural_of("film", "film"));
        assert!(!is_plural_of("movies", "film"));
    }

    #[test]
    fn cont_examples() {
        assert!(cont(&["lake", "washington"], &["lake"]).unwrap());
        assert!(cont(&["tom", "cruise", "movies"], &["tom", "movies"]).unwrap());
        assert!(!cont(&["movies", "cruise"], &["cruise", "movies"]).unwrap());
        assert!(cont(&["movie"], &["movies"]).unwrap());
        assert!(!cont::<&str, &str>(&[], &["x"]).unwrap());
        assert!(cont(&["a"], &[] as &[&str]).is_err());
    }

    fn word() -> impl Strategy<Value = String> {
        "[a-z]{1,9}"
    }

    proptest! {
        #[test]
        fn singularize_is_idempotent(w in word()) {
            let once = singularize(&w);
            prop_assert_eq!(singularize(&once), once);
        }

        #[test]
        fn tokenize_join_roundtrip(raw in "[A-Za-z0-9 ,.;:!?'-]{0,40}") {
            let toks = tokenize(&raw);
            prop_assert_eq!(tokenize(&toks.join(" ")), toks);
        }

        #[test]
        fn cont_is_reflexive(s in prop::collection::vec(word(), 1..6)) {
            prop_assert!(cont(&s, &s).unwrap());
        }

        #[test]
        fn cont_is_monotone(
            s in prop::collection::vec(prop::sample::select(vec!["a", "b", "cs", "c", "d"]), 1..8),
            t in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "ds"]), 1..5),
            mask in prop::collection::vec(any::<bool>(), 5),
        ) {
            let u: Vec<&str> = t.iter().zip(&mask).filter(|(_, &k)| k).map(|(x, _)| *x).collect();
            if cont(&s, &t).unwrap() && !u.is_empty() {
                prop_assert!(cont(&s, &u).unwrap());
            }
        }
    }
}
