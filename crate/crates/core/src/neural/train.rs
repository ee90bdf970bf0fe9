use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::embedding::EmbeddingTable;
use super::model::{Dims, Head, Tag, TagSet, TaggerModel, TaggerParams};
use crate::error::{Error, Result};
use crate::query::{Intent, Span};
use crate::scalar::Scalar;

/// Tokens with one tag each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSequence {
    pub tokens: Vec<String>,
    pub tags: Vec<Tag>,
}

impl LabeledSequence {
    pub fn new(tokens: Vec<String>, tags: Vec<Tag>) -> Result<Self> {
        let seq = LabeledSequence { tokens, tags };
        seq.validate()?;
        Ok(seq)
    }

    /// The tokens of `span` tagged with `tag`, all others `O`.
    pub fn from_span(tokens: Vec<String>, span: Option<Span>, tag: &Tag) -> Result<Self> {
        let tags = (0..tokens.len())
            .map(|i| match span {
                Some(s) if s.contains(i) => tag.clone(),
                _ => Tag::O,
            })
            .collect();
        Self::new(tokens, tags)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// At most one maximal run of non-`O` tags, all of the same type.
    pub fn validate(&self) -> Result<()> {
        if self.tokens.len() != self.tags.len() {
            return Err(Error::data(format!(
                "{} tokens but {} tags",
                self.tokens.len(),
                self.tags.len()
            )));
        }
        if self.tokens.is_empty() {
            return Err(Error::data("empty labeled sequence"));
        }
        let mut seen: Option<&Tag> = None;
        let mut runs = 0;
        let mut prev_o = true;
        for tag in &self.tags {
            if tag.is_o() {
                prev_o = true;
                continue;
            }
            if let Some(s) = seen {
                if s != tag {
                    return Err(Error::data(format!(
                        "sequence {:?} mixes entity types {s} and {tag}",
                        self.tokens.join(" ")
                    )));
                }
            }
            seen = Some(tag);
            if prev_o {
                runs += 1;
            }
            prev_o = false;
        }
        if runs > 1 {
            return Err(Error::data(format!(
                "sequence {:?} has {runs} separate entity runs",
                self.tokens.join(" ")
            )));
        }
        Ok(())
    }

    /// The non-`O` span and its tag, if any.
    pub fn entity_span(&self) -> Option<(Span, &Tag)> {
        let start = self.tags.iter().position(|t| !t.is_o())?;
        let end = start + self.tags[start..].iter().take_while(|t| !t.is_o()).count();
        Some((Span::new(start, end), &self.tags[start]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub char_dim: usize,
    pub char_buckets: usize,
    /// Concatenated BiLSTM state size k; must be even.
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Global gradient norm cap; non-positive disables clipping.
    pub clip_norm: f64,
    pub seed: u64,
    pub head: Head,
    pub intent: Intent,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            char_dim: 8,
            char_buckets: 64,
            hidden: 16,
            epochs: 10,
            batch_size: 16,
            learning_rate: 0.1,
            momentum: 0.9,
            clip_norm: 5.0,
            seed: 7,
            head: Head::Softmax,
            intent: Intent::List,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedTagger<F> {
    pub model: TaggerModel<F>,
    /// Mean per-token training loss after each epoch.
    pub loss_trace: Vec<F>,
}

pub(crate) fn encode_tags(tags: &TagSet, seq: &LabeledSequence) -> Result<Vec<usize>> {
    seq.tags
        .iter()
        .map(|t| {
            tags.index_of(t)
                .ok_or_else(|| Error::data(format!("tag {t} is not in the model's tag set")))
        })
        .collect()
}

/// Mean per-token loss of `model` over `data`.
pub fn mean_token_loss<F: Scalar>(model: &TaggerModel<F>, data: &[LabeledSequence]) -> Result<F> {
    let mut total = F::zero();
    let mut tokens = 0usize;
    for seq in data {
        let gold = encode_tags(&model.tags, seq)?;
        total += model.loss_and_grad(&seq.tokens, &gold, F::one(), None);
        tokens += seq.len();
    }
    if tokens == 0 {
        return Err(Error::data("no tokens to evaluate"));
    }
    Ok(total / F::of_usize(tokens))
}

/// Fraction of tokens whose highest-probability tag is the gold tag.
pub fn token_accuracy<F: Scalar>(model: &TaggerModel<F>, data: &[LabeledSequence]) -> Result<f64> {
    let mut right = 0usize;
    let mut total = 0usize;
    for seq in data {
        let gold = encode_tags(&model.tags, seq)?;
        let m = model.score_tokens(&seq.tokens);
        for (row, &g) in m.probs.iter().zip(&gold) {
            let best = row
                .iter()
                .enumerate()
                .fold(0, |b, (j, &p)| if p > row[b] { j } else { b });
            right += usize::from(best == g);
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::data("no tokens to evaluate"));
    }
    Ok(right as f64 / total as f64)
}

/// Mini-batch gradient descent with momentum on per-token loss.
///
/// Deterministic for a given seed, data order and config.
pub fn train<F: Scalar>(
    examples: &[LabeledSequence],
    tags: TagSet,
    embeddings: EmbeddingTable<F>,
    config: &TrainingConfig,
) -> Result<TrainedTagger<F>> {
    if examples.is_empty() {
        return Err(Error::data("no training examples"));
    }
    if config.batch_size == 0 {
        return Err(Error::config("batch_size must be positive"));
    }
    let encoded = examples
        .iter()
        .map(|seq| {
            seq.validate()?;
            encode_tags(&tags, seq)
        })
        .collect::<Result<Vec<_>>>()?;
    let dims = Dims {
        word_dim: embeddings.dim(),
        char_dim: config.char_dim,
        char_buckets: config.char_buckets,
        hidden: config.hidden,
    };
    let mut model = TaggerModel::zeros(embeddings, tags, dims, config.head, config.intent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    model.params.randomize(&mut rng);

    let lr = F::of(config.learning_rate);
    let mu = F::of(config.momentum);
    let mut velocity = model.params.zeros_like();
    let mut grad = model.params.zeros_like();
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let tokens: usize = batch.iter().map(|&i| examples[i].len()).sum();
            let scale = F::one() / F::of_usize(tokens);
            grad.tensors_mut().into_iter().for_each(|t| t.fill_zero());
            for &i in batch {
                model.loss_and_grad(&examples[i].tokens, &encoded[i], scale, Some(&mut grad));
            }
            clip(&mut grad, config.clip_norm);
            step(&mut model.params, &mut velocity, &grad, lr, mu);
        }
        loss_trace.push(mean_token_loss(&model, examples)?);
    }
    Ok(TrainedTagger { model, loss_trace })
}

fn clip<F: Scalar>(grad: &mut TaggerParams<F>, max_norm: f64) {
    if max_norm <= 0.0 {
        return;
    }
    let norm: F = grad
        .tensors()
        .iter()
        .flat_map(|t| t.data.iter())
        .map(|&g| g * g)
        .sum::<F>()
        .sqrt();
    let cap = F::of(max_norm);
    if norm > cap {
        let factor = cap / norm;
        for t in grad.tensors_mut() {
            t.data.iter_mut().for_each(|g| *g *= factor);
        }
    }
}

fn step<F: Scalar>(params: &mut TaggerParams<F>, velocity: &mut TaggerParams<F>, grad: &TaggerParams<F>, lr: F, mu: F) {
    let grads = grad.tensors();
    for ((p, v), g) in params.tensors_mut().into_iter().zip(velocity.tensors_mut()).zip(grads) {
        for ((pv, vv), &gv) in p.data.iter_mut().zip(v.data.iter_mut()).zip(&g.data) {
            *vv = mu * *vv - lr * gv;
            *pv += *vv;
        }
    }
}
