//! Thresholded mapping from per-token tag probabilities to a tagged query.

use super::model::{TaggerModel, TokenScoreMatrix, TagSet};
use crate::error::{Error, Result};
use crate::query::{Intent, Query, Span, TaggedQuery};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedSpan<F> {
    pub span: Span,
    /// Index of the entity type tag.
    pub tag: usize,
    /// Mean of the span's probabilities for `tag`.
    pub confidence: F,
}

/// Applies the three decoding cases to a probability matrix.
///
/// Returns the span when exactly one contiguous run of tokens exceeds `rho`
/// on a single entity type and nothing else exceeds `rho` on any entity
/// type. No exceedance, a gap, or a second type all give `None`.
pub fn decode_probs<F: Scalar>(probs: &[Vec<F>], o_index: usize, rho: F) -> Option<DecodedSpan<F>> {
    let mut tag: Option<usize> = None;
    let mut first = None;
    let mut last = 0;
    for (i, row) in probs.iter().enumerate() {
        let mut hit = false;
        for (j, &p) in row.iter().enumerate() {
            if j == o_index || p <= rho {
                continue;
            }
            match tag {
                Some(t) if t != j => return None,
                _ => tag = Some(j),
            }
            hit = true;
        }
        if hit {
            if first.is_some() && last + 1 != i {
                return None;
            }
            first.get_or_insert(i);
            last = i;
        }
    }
    let (start, tag) = (first?, tag?);
    let span = Span::new(start, last + 1);
    let mut total = F::zero();
    for row in &probs[span.range()] {
        total += row[tag];
    }
    Some(DecodedSpan {
        span,
        tag,
        confidence: total / F::of_usize(span.len()),
    })
}

pub fn decode<F: Scalar>(
    matrix: &TokenScoreMatrix<F>,
    rho: F,
    intent: Intent,
    query: &Query,
    tags: &TagSet,
) -> Option<TaggedQuery> {
    let hit = decode_probs(&matrix.probs, tags.o_index(), rho)?;
    let set_type = tags.types()[hit.tag].clone();
    let confidence = hit.confidence.as_f64().clamp(0.0, 1.0);
    TaggedQuery::new(query.clone(), intent, hit.span, set_type, confidence).ok()
}

/// `forward` followed by `decode` with the model's intent.
pub fn predict_tagged_query<F: Scalar>(model: &TaggerModel<F>, q: &Query, rho: F) -> Result<Option<TaggedQuery>> {
    if !(rho > F::zero() && rho < F::one()) {
        return Err(Error::contract(format!("rho must lie in (0, 1), got {rho}")));
    }
    if q.is_empty() {
        return Ok(None);
    }
    let matrix = model.forward(q)?;
    Ok(decode(&matrix, rho, model.intent, q, &model.tags))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Tag order: city, film, river, O.
    fn rows(v: &[[f64; 4]]) -> Vec<Vec<f64>> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn all_below_threshold_is_null() {
        let p = rows(&[[0.05, 0.05, 0.25, 0.65], [0.1, 0.05, 0.28, 0.57], [0.0, 0.1, 0.0, 0.9], [0.05, 0.0, 0.05, 0.9]]);
        assert_eq!(decode_probs(&p, 3, 0.3), None);
    }

    #[test]
    fn single_token_span() {
        let p = rows(&[[0.05, 0.05, 0.0, 0.9], [0.0, 0.1, 0.0, 0.9], [0.02, 0.9, 0.03, 0.05]]);
        let hit = decode_probs(&p, 3, 0.3).unwrap();
        assert_eq!(hit.span, Span::new(2, 3));
        assert_eq!(hit.tag, 1);
        assert_eq!(hit.confidence, 0.9);
    }

    #[test]
    fn multi_token_span_averages() {
        let p = rows(&[[0.0, 0.0, 0.0, 1.0], [0.6, 0.0, 0.0, 0.4], [0.8, 0.0, 0.0, 0.2]]);
        let hit = decode_probs(&p, 3, 0.5).unwrap();
        assert_eq!(hit.span, Span::new(1, 3));
        assert_eq!(hit.confidence, (0.6 + 0.8) / 2.0);
    }

    #[test]
    fn gaps_and_second_types_are_null() {
        let gap = rows(&[[0.9, 0.0, 0.0, 0.1], [0.0, 0.0, 0.0, 1.0], [0.9, 0.0, 0.0, 0.1]]);
        assert_eq!(decode_probs(&gap, 3, 0.3), None);
        let two_types = rows(&[[0.9, 0.0, 0.0, 0.1], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.8, 0.2]]);
        assert_eq!(decode_probs(&two_types, 3, 0.3), None);
        let adjacent_types = rows(&[[0.9, 0.0, 0.0, 0.1], [0.0, 0.8, 0.0, 0.2]]);
        assert_eq!(decode_probs(&adjacent_types, 3, 0.3), None);
    }

    #[test]
    fn equal_scores_on_two_types_are_null() {
        let tie = rows(&[[0.45, 0.45, 0.0, 0.1]]);
        assert_eq!(decode_probs(&tie, 3, 0.3), None);
        assert!(decode_probs(&tie, 3, 0.46).is_none());
    }

    #[test]
    fn o_tag_never_triggers() {
        let p = rows(&[[0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(decode_probs(&p, 3, 0.1), None);
    }
}
