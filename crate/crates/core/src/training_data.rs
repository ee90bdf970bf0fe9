//! Tagger training examples derived from a query log by the dictionary
//! tagger and its rejects.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dict_tagger::{BaselineMode, BaselineTagger, RejectionReason};
use crate::error::{read_to_string, Error, Result};
use crate::lexicon::TypeId;
use crate::neural::{LabeledSequence, SequenceRecord, Tag};
use crate::query::Query;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLogEntry {
    pub query: String,
    pub impressions: u64,
}

/// Parses `query<TAB>impressions` lines; blank and `#` lines are skipped.
pub fn parse_query_log(text: &str, source_name: &str) -> Result<Vec<QueryLogEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (query, imp) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::parse(source_name, i + 1, "expected query<TAB>impressions"))?;
        let impressions = imp
            .trim()
            .parse()
            .map_err(|e| Error::parse(source_name, i + 1, format!("bad impression count {imp:?}: {e}")))?;
        out.push(QueryLogEntry {
            query: query.trim().to_string(),
            impressions,
        });
    }
    Ok(out)
}

pub fn load_query_log(path: impl AsRef<Path>) -> Result<Vec<QueryLogEntry>> {
    let path = path.as_ref();
    parse_query_log(&read_to_string(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleSource {
    Positive,
    EntityRejected,
    RootRejected,
}

impl ExampleSource {
    pub const ALL: [ExampleSource; 3] = [Self::Positive, Self::EntityRejected, Self::RootRejected];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::EntityRejected => "entity_rejected",
            Self::RootRejected => "root_rejected",
        }
    }
}

impl fmt::Display for ExampleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::data(format!("unknown example source {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub sequence: LabeledSequence,
    pub source: ExampleSource,
}

impl LabeledExample {
    pub fn tokens(&self) -> &[String] {
        &self.sequence.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.sequence.tags
    }

    pub fn type_id(&self) -> Option<&TypeId> {
        self.sequence.entity_span().and_then(|(_, t)| t.type_id())
    }

    pub fn to_record(&self) -> SequenceRecord {
        SequenceRecord {
            sequence: self.sequence.clone(),
            source: Some(self.source.to_string()),
        }
    }

    pub fn from_record(r: SequenceRecord) -> Result<Self> {
        let source = r
            .source
            .as_deref()
            .ok_or_else(|| Error::data("example without a source comment"))?
            .parse()?;
        Ok(LabeledExample {
            sequence: r.sequence,
            source,
        })
    }
}

/// Target proportions of positives, entity-name rejects and root rejects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub positive: f64,
    pub entity_rejected: f64,
    pub root_rejected: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Mix {
            positive: 0.5,
            entity_rejected: 0.2,
            root_rejected: 0.3,
        }
    }
}

impl Mix {
    /// Positives only.
    pub const POSITIVE_ONLY: Mix = Mix {
        positive: 1.0,
        entity_rejected: 0.0,
        root_rejected: 0.0,
    };

    pub fn weight(&self, s: ExampleSource) -> f64 {
        match s {
            ExampleSource::Positive => self.positive,
            ExampleSource::EntityRejected => self.entity_rejected,
            ExampleSource::RootRejected => self.root_rejected,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ws = ExampleSource::ALL.map(|s| self.weight(s));
        if ws.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config(format!("mix weights must be non-negative: {self:?}")));
        }
        let total: f64 = ws.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("mix weights sum to {total}, not 1")));
        }
        Ok(())
    }
}

impl FromStr for Mix {
    type Err = Error;

    /// `p/e/r`, e.g. `0.5/0.2/0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(['/', ','])
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::config(format!("bad mix {s:?}: {e}")))?;
        let [positive, entity_rejected, root_rejected] = parts[..] else {
            return Err(Error::config(format!("mix {s:?} needs three weights")));
        };
        let mix = Mix {
            positive,
            entity_rejected,
            root_rejected,
        };
        mix.validate()?;
        Ok(mix)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub min_impressions: u64,
    pub mix: Mix,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            min_impressions: 100,
            mix: Mix::default(),
            seed: 7,
        }
    }
}

/// Labels every sufficiently frequent log query the dictionary tagger
/// accepts, or rejects for an entity name or a failed root check, then
/// downsamples to the configured mix. Output keeps log order.
pub fn generate(log: &[QueryLogEntry], tagger: &BaselineTagger, config: &GenerationConfig) -> Result<Vec<LabeledExample>> {
    config.mix.validate()?;
    if log.is_empty() {
        log::warn!("query log is empty; no training examples generated");
        return Ok(Vec::new());
    }
    let mut pools: BTreeMap<ExampleSource, Vec<LabeledExample>> = BTreeMap::new();
    let mut order = Vec::new();
    for entry in log.iter().filter(|e| e.impressions >= config.min_impressions) {
        let q = Query::new(&entry.query);
        if q.is_empty() {
            continue;
        }
        let outcome = tagger.tag(BaselineMode::TdlErDp, &q);
        let example = match (outcome.tagged, outcome.reason) {
            (Some(tq), _) => LabeledExample {
                sequence: LabeledSequence::from_span(q.toks().to_vec(), Some(tq.span()), &Tag::Type(tq.set_type().clone()))?,
                source: ExampleSource::Positive,
            },
            (None, RejectionReason::EntityName) => negative(&q, ExampleSource::EntityRejected)?,
            (None, RejectionReason::NotRoot) => negative(&q, ExampleSource::RootRejected)?,
            _ => continue,
        };
        let pool = pools.entry(example.source).or_default();
        order.push((example.source, pool.len()));
        pool.push(example);
    }
    let keep = downsample_counts(&pools, &config.mix);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut selected: BTreeMap<ExampleSource, Vec<bool>> = BTreeMap::new();
    for source in ExampleSource::ALL {
        let have = pools.get(&source).map_or(0, Vec::len);
        let mut mask = vec![false; have];
        for i in sample(&mut rng, have, keep[&source]) {
            mask[i] = true;
        }
        selected.insert(source, mask);
    }
    let mut out = Vec::new();
    for (source, i) in order {
        if selected[&source][i] {
            out.push(pools[&source][i].clone());
        }
    }
    Ok(out)
}

fn negative(q: &Query, source: ExampleSource) -> Result<LabeledExample> {
    Ok(LabeledExample {
        sequence: LabeledSequence::from_span(q.toks().to_vec(), None, &Tag::O)?,
        source,
    })
}

/// Largest per-source counts that fit the available pools and the mix.
/// Sources with positive weight but no examples are dropped from the mix,
/// which is renormalised over the rest.
fn downsample_counts(pools: &BTreeMap<ExampleSource, Vec<LabeledExample>>, mix: &Mix) -> BTreeMap<ExampleSource, usize> {
    let have = |s: ExampleSource| pools.get(&s).map_or(0, Vec::len);
    let live: Vec<ExampleSource> = ExampleSource::ALL
        .into_iter()
        .filter(|&s| mix.weight(s) > 0.0)
        .filter(|&s| {
            let present = have(s) > 0;
            if !present {
                log::warn!("no {s} examples available; mix renormalised without them");
            }
            present
        })
        .collect();
    let total_w: f64 = live.iter().map(|&s| mix.weight(s)).sum();
    let target_total = live
        .iter()
        .map(|&s| have(s) as f64 / (mix.weight(s) / total_w))
        .fold(f64::INFINITY, f64::min);
    ExampleSource::ALL
        .into_iter()
        .map(|s| {
            let n = if live.contains(&s) {
                ((mix.weight(s) / total_w * target_total).round() as usize).min(have(s))
            } else {
                0
            };
            (s, n)
        })
        .collect()
}

/// Caps positives at `per_type_cap` per type by seeded sampling; negatives
/// pass through. Output keeps input order.
pub fn stratify(examples: &[LabeledExample], per_type_cap: usize, seed: u64) -> Result<Vec<LabeledExample>> {
    if per_type_cap == 0 {
        return Err(Error::config("per_type_cap must be positive"));
    }
    let mut by_type: BTreeMap<&TypeId, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        if ex.source == ExampleSource::Positive {
            if let Some(t) = ex.type_id() {
                by_type.entry(t).or_default().push(i);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![true; examples.len()];
    for idx in by_type.values() {
        if idx.len() <= per_type_cap {
            continue;
        }
        idx.iter().for_each(|&i| keep[i] = false);
        for j in sample(&mut rng, idx.len(), per_type_cap) {
            keep[idx[j]] = true;
        }
    }
    Ok(examples
        .iter()
        .zip(keep)
        .filter_map(|(ex, k)| k.then(|| ex.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(q: &str, n: u64) -> QueryLogEntry {
        QueryLogEntry {
            query: q.into(),
            impressions: n,
        }
    }

    #[test]
    fn worked_examples() {
        let log = [entry("tom cruise films", 500), entry("joan rivers net worth", 500)];
        let cfg = GenerationConfig {
            mix: Mix {
                positive: 0.5,
                entity_rejected: 0.5,
                root_rejected: 0.0,
            },
            ..GenerationConfig::default()
        };
        let out = generate(&log, &BaselineTagger::bundled(), &cfg).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].source, ExampleSource::Positive);
        assert_eq!(out[0].tags(), &[Tag::O, Tag::O, Tag::Type(TypeId::new("film"))]);
        assert_eq!(out[1].source, ExampleSource::EntityRejected);
        assert!(out[1].tags().iter().all(Tag::is_o));
        assert_eq!(out[1].tokens().len(), 4);
    }

    #[test]
    fn low_impression_entries_are_dropped() {
        let log = [entry("tom cruise films", 50), entry("rivers in texas", 100)];
        let cfg = GenerationConfig {
            mix: Mix::POSITIVE_ONLY,
            ..GenerationConfig::default()
        };
        let out = generate(&log, &BaselineTagger::bundled(), &cfg).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].tokens()[0], "rivers");
    }

    #[test]
    fn bad_mix_and_empty_log() {
        let bad = GenerationConfig {
            mix: Mix {
                positive: 0.5,
                entity_rejected: 0.5,
                root_rejected: 0.5,
            },
            ..GenerationConfig::default()
        };
        assert!(matches!(generate(&[], &BaselineTagger::bundled(), &bad), Err(Error::Config(_))));
        let out = generate(&[], &BaselineTagger::bundled(), &GenerationConfig::default()).unwrap();
        assert!(out.is_empty());
        assert!("0.5/0.2/0.3".parse::<Mix>().is_ok());
        assert!("0.5/0.2".parse::<Mix>().is_err());
    }

    fn film(n: usize) -> Vec<LabeledExample> {
        (0..n)
            .map(|i| LabeledExample {
                sequence: LabeledSequence::from_span(
                    vec![format!("w{i}"), "films".into()],
                    Some(crate::query::Span::new(1, 2)),
                    &Tag::Type(TypeId::new("film")),
                )
                .unwrap(),
                source: ExampleSource::Positive,
            })
            .collect()
    }

    #[test]
    fn stratify_caps_per_type() {
        let ex = film(10);
        assert_eq!(stratify(&ex, 3, 1).unwrap().len(), 3);
        assert_eq!(stratify(&ex, 30, 1).unwrap().len(), 10);
        assert_eq!(stratify(&[], 3, 1).unwrap().len(), 0);
        assert_eq!(stratify(&ex, 3, 1).unwrap(), stratify(&ex, 3, 1).unwrap());
        assert!(stratify(&ex, 0, 1).is_err());
    }
}
