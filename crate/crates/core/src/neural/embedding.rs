use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::scalar::Scalar;

/// Frozen pretrained word vectors.
///
/// Out-of-vocabulary tokens map to the zero vector, leaving the character
/// encoder to represent them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct EmbeddingTable<F> {
    dim: usize,
    vectors: BTreeMap<String, Vec<F>>,
}

impl<F: Scalar> EmbeddingTable<F> {
    pub fn new(dim: usize, vectors: BTreeMap<String, Vec<F>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::integrity("embedding dimension must be positive"));
        }
        if let Some((tok, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::integrity(format!(
                "embedding for {tok:?} has {} components, expected {dim}",
                v.len()
            )));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    /// A table with no vocabulary; every token uses the fallback.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, BTreeMap::new())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    /// Reads `token v1 … vd` lines, with an optional `count dim` header.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut vectors = BTreeMap::new();
        let mut dim: Option<usize> = None;
        let mut declared_count = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if idx == 0 && fields.len() == 2 {
                if let (Ok(count), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                    dim = Some(d);
                    declared_count = Some(count);
                    continue;
                }
            }
            let values = fields[1..]
                .iter()
                .map(|v| v.parse::<f64>().map(F::of))
                .collect::<std::result::Result<Vec<F>, _>>()
                .map_err(|e| Error::parse(source_name, line_no, format!("bad vector component: {e}")))?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::parse(
                        source_name,
                        line_no,
                        format!("expected {d} components, found {}", values.len()),
                    ))
                }
                Some(_) => {}
            }
            vectors.insert(fields[0].to_lowercase(), values);
        }
        if let Some(count) = declared_count {
            if count != vectors.len() {
                log::warn!("{source_name}: header declares {count} vectors, found {}", vectors.len());
            }
        }
        let dim = dim.ok_or_else(|| Error::parse(source_name, 0, "no embedding vectors"))?;
        Self::new(dim, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[F]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Writes the vector of `token` into `out`, or zeros when unknown.
    pub fn write_vector(&self, token: &str, out: &mut [F]) {
        match self.vectors.get(token) {
            Some(v) => out.copy_from_slice(v),
            None => out.iter_mut().for_each(|x| *x = F::zero()),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    /// Tokens nearest to `query` by cosine similarity.
    pub fn nearest(&self, query: &[F], k: usize) -> Vec<(String, F)> {
        let norm = |v: &[F]| v.iter().map(|&x| x * x).sum::<F>().sqrt();
        let qn = norm(query);
        let mut scored: Vec<(String, F)> = self
            .vectors
            .iter()
            .map(|(tok, v)| {
                let dot: F = v.iter().zip(query).map(|(&a, &b)| a * b).sum();
                let denom = norm(v) * qn;
                let cos = if denom > F::zero() { dot / denom } else { F::zero() };
                (tok.clone(), cos)
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }
}
