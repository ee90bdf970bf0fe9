#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tableqna::lexicon::TypeId;
use tableqna::neural::{Dims, EmbeddingTable, Head, LabeledSequence, Tag, TagSet, TaggerModel};
use tableqna::query::{Intent, Span};

pub const TINY_TYPES: [&str; 3] = ["city", "film", "river"];
pub const TINY_VOCAB: [&str; 6] = ["tom", "cruise", "movies", "films", "rivers", "in"];

pub fn tiny_tags() -> TagSet {
    TagSet::new(TINY_TYPES.iter().map(|t| TypeId::new(*t)).collect()).unwrap()
}

/// A randomly initialised model with every parameter, biases included,
/// drawn away from zero.
pub fn random_tiny_model(seed: u64, word_dim: usize, char_dim: usize, hidden: usize, head: Head) -> TaggerModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: BTreeMap<String, Vec<f64>> = TINY_VOCAB
        .iter()
        .map(|t| (t.to_string(), (0..word_dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect();
    let embeddings = EmbeddingTable::new(word_dim, vectors).unwrap();
    let dims = Dims {
        word_dim,
        char_dim,
        char_buckets: 16,
        hidden,
    };
    let mut model = TaggerModel::zeros(embeddings, tiny_tags(), dims, head, Intent::List).unwrap();
    for t in model.params.tensors_mut() {
        t.data.iter_mut().for_each(|v| *v = rng.gen_range(-0.8..0.8));
    }
    model
}

pub fn random_sequence(rng: &mut impl Rng, max_len: usize) -> LabeledSequence {
    let len = rng.gen_range(1..=max_len);
    let tokens: Vec<String> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.8) {
                TINY_VOCAB[rng.gen_range(0..TINY_VOCAB.len())].to_string()
            } else {
                "zzq".to_string()
            }
        })
        .collect();
    let span = if rng.gen_bool(0.7) {
        let s = rng.gen_range(0..len);
        let e = rng.gen_range(s + 1..=len);
        Some(Span::new(s, e))
    } else {
        None
    };
    let tag = Tag::Type(TypeId::new(TINY_TYPES[rng.gen_range(0..3)]));
    LabeledSequence::from_span(tokens, span, &tag).unwrap()
}

/// Reference decoder: tries every span and every entity type and keeps the
/// candidates whose exceedance pattern is exactly that span on that type.
pub fn brute_force_decode(probs: &[Vec<f64>], o_index: usize, rho: f64) -> Option<(Span, usize, f64)> {
    let n = probs.len();
    let k = probs.first().map_or(0, Vec::len);
    let mut found = Vec::new();
    for start in 0..n {
        for end in start + 1..=n {
            for t in (0..k).filter(|&t| t != o_index) {
                let ok = (0..n).all(|i| {
                    (0..k).filter(|&j| j != o_index).all(|j| {
                        let inside = (start..end).contains(&i) && j == t;
                        (probs[i][j] > rho) == inside
                    })
                });
                if ok {
                    let mean = probs[start..end].iter().map(|r| r[t]).sum::<f64>() / (end - start) as f64;
                    found.push((Span::new(start, end), t, mean));
                }
            }
        }
    }
    assert!(found.len() <= 1, "exceedance pattern admits several spans");
    found.pop()
}

/// Random rows from the simplex, with some rows sharpened on one tag so
/// that exceedances are common.
pub fn random_prob_matrix(rng: &mut impl Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0f64).powi(3)).collect();
            if rng.gen_bool(0.5) {
                row[rng.gen_range(0..k)] += 2.0;
            }
            let z: f64 = row.iter().sum();
            row.iter().map(|v| v / z).collect()
        })
        .collect()
}

/// Naive order-preserving subsequence test on already folded tokens.
pub fn naive_subsequence(s: &[String], t: &[String]) -> bool {
    fn go(s: &[String], t: &[String]) -> bool {
        match (s.split_first(), t.split_first()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((a, rest_s)), Some((b, rest_t))) => (a == b && go(rest_s, rest_t)) || go(rest_s, t),
        }
    }
    go(s, t)
}

pub mod fixtures;
