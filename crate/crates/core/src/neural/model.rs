use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::char_encoder::{trigram_buckets, CharEncoder};
use super::crf::CrfParams;
use super::embedding::EmbeddingTable;
use super::lstm::{Lstm, LstmStep};
use super::matrix::Matrix;
use crate::error::{read_to_string, Error, Result};
use crate::lexicon::{TypeDictionary, TypeId};
use crate::query::{Intent, Query};
use crate::scalar::{log_sum_exp, softmax_into, Scalar};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A sequence tag: an entity type or `O`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    O,
    Type(TypeId),
}

impl Tag {
    pub fn is_o(&self) -> bool {
        matches!(self, Tag::O)
    }

    pub fn type_id(&self) -> Option<&TypeId> {
        match self {
            Tag::O => None,
            Tag::Type(t) => Some(t),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::O => f.write_str("O"),
            Tag::Type(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "" => Err(Error::data("empty tag")),
            "O" => Ok(Tag::O),
            t => Ok(Tag::Type(TypeId::new(t))),
        }
    }
}

/// Bijection between tags and score indices; `O` takes the last index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSet {
    types: Vec<TypeId>,
}

impl TagSet {
    pub fn new(mut types: Vec<TypeId>) -> Result<Self> {
        types.sort();
        let before = types.len();
        types.dedup();
        if types.len() != before {
            return Err(Error::integrity("duplicate type in tag set"));
        }
        if types.is_empty() {
            return Err(Error::integrity("tag set needs at least one entity type"));
        }
        Ok(TagSet { types })
    }

    pub fn from_dictionary(td: &TypeDictionary) -> Self {
        TagSet {
            types: td.type_ids().cloned().collect(),
        }
    }

    /// Number of tags including `O`.
    pub fn len(&self) -> usize {
        self.types.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn o_index(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[TypeId] {
        &self.types
    }

    pub fn index_of_type(&self, t: &TypeId) -> Option<usize> {
        self.types.binary_search(t).ok()
    }

    pub fn index_of(&self, tag: &Tag) -> Option<usize> {
        match tag {
            Tag::O => Some(self.o_index()),
            Tag::Type(t) => self.index_of_type(t),
        }
    }

    pub fn tag(&self, index: usize) -> Tag {
        if index == self.o_index() {
            Tag::O
        } else {
            Tag::Type(self.types[index].clone())
        }
    }
}

/// Prediction head on top of the per-token scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    #[default]
    Softmax,
    Crf,
}

impl FromStr for Head {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "softmax" => Ok(Head::Softmax),
            "crf" => Ok(Head::Crf),
            other => Err(Error::config(format!("unknown head {other:?}"))),
        }
    }
}

/// Every trainable parameter of the tagger. Embeddings are frozen and live
/// on the model instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TaggerParams<F> {
    pub char_encoder: CharEncoder<F>,
    pub forward: Lstm<F>,
    pub backward: Lstm<F>,
    /// `(|T|+1) × k` decode weights.
    pub out_w: Matrix<F>,
    pub out_b: Matrix<F>,
    pub crf: Option<CrfParams<F>>,
}

impl<F: Scalar> TaggerParams<F> {
    pub fn zeros(dims: &Dims, tags: usize, head: Head) -> Self {
        let half = dims.hidden / 2;
        TaggerParams {
            char_encoder: CharEncoder::zeros(dims.char_buckets, dims.char_dim),
            forward: Lstm::zeros(dims.input(), half),
            backward: Lstm::zeros(dims.input(), half),
            out_w: Matrix::zeros(tags, dims.hidden),
            out_b: Matrix::column(tags),
            crf: (head == Head::Crf).then(|| CrfParams::zeros(tags)),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.tensors_mut().into_iter().for_each(Matrix::fill_zero);
        z
    }

    pub fn tensors(&self) -> Vec<&Matrix<F>> {
        let mut out = vec![
            &self.char_encoder.table,
            &self.char_encoder.proj,
            &self.forward.w,
            &self.forward.u,
            &self.forward.b,
            &self.backward.w,
            &self.backward.u,
            &self.backward.b,
            &self.out_w,
            &self.out_b,
        ];
        if let Some(crf) = &self.crf {
            out.extend([&crf.trans, &crf.start, &crf.end]);
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix<F>> {
        let mut out = vec![
            &mut self.char_encoder.table,
            &mut self.char_encoder.proj,
            &mut self.forward.w,
            &mut self.forward.u,
            &mut self.forward.b,
            &mut self.backward.w,
            &mut self.backward.u,
            &mut self.backward.b,
            &mut self.out_w,
            &mut self.out_b,
        ];
        if let Some(crf) = &mut self.crf {
            out.extend([&mut crf.trans, &mut crf.start, &mut crf.end]);
        }
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// Uniform ±1/√fan-in weights; biases start at zero.
    pub fn randomize<R: Rng>(&mut self, rng: &mut R) {
        let fill = |m: &mut Matrix<F>, rng: &mut R| {
            let bound = 1.0 / (m.cols.max(1) as f64).sqrt();
            m.data.iter_mut().for_each(|v| *v = F::of(rng.gen_range(-bound..bound)));
        };
        fill(&mut self.char_encoder.table, rng);
        fill(&mut self.char_encoder.proj, rng);
        for lstm in [&mut self.forward, &mut self.backward] {
            fill(&mut lstm.w, rng);
            fill(&mut lstm.u, rng);
        }
        fill(&mut self.out_w, rng);
        if let Some(crf) = &mut self.crf {
            fill(&mut crf.trans, rng);
        }
    }
}

/// Layer sizes. `hidden` is k; each direction has `k/2` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub word_dim: usize,
    pub char_dim: usize,
    pub char_buckets: usize,
    pub hidden: usize,
}

impl Dims {
    /// n = dw + dc.
    pub fn input(&self) -> usize {
        self.word_dim + self.char_dim
    }
}

/// Raw scores `s_i` and normalized scores `p_i` for every query token.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenScoreMatrix<F> {
    pub scores: Vec<Vec<F>>,
    pub probs: Vec<Vec<F>>,
}

impl<F: Scalar> TokenScoreMatrix<F> {
    /// Builds the matrix from raw scores with a per-token softmax.
    pub fn from_scores(scores: Vec<Vec<F>>) -> Self {
        let probs = scores
            .iter()
            .map(|s| {
                let mut p = vec![F::zero(); s.len()];
                softmax_into(s, &mut p);
                p
            })
            .collect();
        TokenScoreMatrix { scores, probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Forward activations of one sequence, reused by backpropagation.
pub(crate) struct ForwardCache<F> {
    trigrams: Vec<Vec<usize>>,
    char_means: Vec<Vec<F>>,
    xs: Vec<Vec<F>>,
    fwd: Vec<LstmStep<F>>,
    bwd: Vec<LstmStep<F>>,
    hs: Vec<Vec<F>>,
    pub(crate) scores: Vec<Vec<F>>,
}

/// BiLSTM sequence tagger with a softmax (or CRF) decode layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TaggerModel<F> {
    pub version: u32,
    pub dims: Dims,
    pub tags: TagSet,
    pub head: Head,
    pub intent: Intent,
    pub embeddings: EmbeddingTable<F>,
    pub params: TaggerParams<F>,
}

impl<F: Scalar> TaggerModel<F> {
    /// A model with all-zero parameters.
    pub fn zeros(embeddings: EmbeddingTable<F>, tags: TagSet, dims: Dims, head: Head, intent: Intent) -> Result<Self> {
        if dims.word_dim != embeddings.dim() {
            return Err(Error::integrity(format!(
                "word_dim {} differs from embedding dimension {}",
                dims.word_dim,
                embeddings.dim()
            )));
        }
        if dims.hidden == 0 || dims.hidden % 2 != 0 {
            return Err(Error::integrity("hidden size must be a positive even number"));
        }
        if dims.char_buckets == 0 || dims.char_dim == 0 {
            return Err(Error::integrity("character encoder needs positive buckets and dimension"));
        }
        let params = TaggerParams::zeros(&dims, tags.len(), head);
        Ok(TaggerModel {
            version: MODEL_FORMAT_VERSION,
            dims,
            tags,
            head,
            intent,
            embeddings,
            params,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dims;
        let k = self.tags.len();
        let p = &self.params;
        let half = d.hidden / 2;
        let checks = [
            (self.version == MODEL_FORMAT_VERSION, "unsupported model version"),
            (d.hidden % 2 == 0 && d.hidden > 0, "hidden size must be even"),
            (self.embeddings.dim() == d.word_dim, "embedding dimension mismatch"),
            (p.char_encoder.table.rows == d.char_buckets && p.char_encoder.table.cols == d.char_dim, "char table shape"),
            (p.char_encoder.proj.rows == d.char_dim && p.char_encoder.proj.cols == d.char_dim, "char projection shape"),
            (p.forward.is_consistent() && p.forward.hidden() == half && p.forward.input() == d.input(), "forward LSTM shape"),
            (p.backward.is_consistent() && p.backward.hidden() == half && p.backward.input() == d.input(), "backward LSTM shape"),
            (p.out_w.rows == k && p.out_w.cols == d.hidden && p.out_w.is_consistent(), "decode weight shape"),
            (p.out_b.rows == k && p.out_b.cols == 1 && p.out_b.is_consistent(), "decode bias shape"),
            (p.char_encoder.table.is_consistent() && p.char_encoder.proj.is_consistent(), "char encoder storage"),
            (
                match (&p.crf, self.head) {
                    (Some(crf), Head::Crf) => crf.tags() == k && crf.is_consistent(),
                    (None, Head::Softmax) => true,
                    _ => false,
                },
                "CRF parameters do not match head",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::integrity(*msg)),
            None => Ok(()),
        }
    }

    pub(crate) fn forward_cached<S: AsRef<str>>(&self, toks: &[S]) -> ForwardCache<F> {
        let d = &self.dims;
        let enc = &self.params.char_encoder;
        let mut trigrams = Vec::with_capacity(toks.len());
        let mut char_means = Vec::with_capacity(toks.len());
        let mut xs = Vec::with_capacity(toks.len());
        for tok in toks {
            let tok = tok.as_ref();
            let ids = trigram_buckets(tok, d.char_buckets);
            let mean = enc.mean(&ids);
            let mut x = vec![F::zero(); d.input()];
            self.embeddings.write_vector(tok, &mut x[..d.word_dim]);
            enc.proj.mul_vec_acc(&mean, &mut x[d.word_dim..]);
            trigrams.push(ids);
            char_means.push(mean);
            xs.push(x);
        }
        let x_refs: Vec<&[F]> = xs.iter().map(Vec::as_slice).collect();
        let fwd = self.params.forward.forward(&x_refs);
        let rev: Vec<&[F]> = x_refs.iter().rev().copied().collect();
        let bwd = self.params.backward.forward(&rev);
        let n = toks.len();
        let mut hs = Vec::with_capacity(n);
        let mut scores = Vec::with_capacity(n);
        for i in 0..n {
            let mut h = fwd[i].h.clone();
            h.extend_from_slice(&bwd[n - 1 - i].h);
            let mut s = self.params.out_b.data.clone();
            self.params.out_w.mul_vec_acc(&h, &mut s);
            hs.push(h);
            scores.push(s);
        }
        ForwardCache {
            trigrams,
            char_means,
            xs,
            fwd,
            bwd,
            hs,
            scores,
        }
    }

    /// Scores every token of `q` against every tag.
    pub fn forward(&self, q: &Query) -> Result<TokenScoreMatrix<F>> {
        if q.is_empty() {
            return Err(Error::contract("forward needs a query with at least one token"));
        }
        self.validate()?;
        Ok(self.score_tokens(q.toks()))
    }

    pub(crate) fn score_tokens<S: AsRef<str>>(&self, toks: &[S]) -> TokenScoreMatrix<F> {
        let cache = self.forward_cached(toks);
        match (&self.head, &self.params.crf) {
            (Head::Crf, Some(crf)) => {
                let probs = crf.marginals(&cache.scores);
                TokenScoreMatrix {
                    scores: cache.scores,
                    probs,
                }
            }
            _ => TokenScoreMatrix::from_scores(cache.scores),
        }
    }

    /// Summed per-token loss of one labelled sequence.
    ///
    /// When `grad` is given, `scale ×` the loss gradient is accumulated
    /// into it. The softmax head uses cross-entropy per token; the CRF head
    /// uses the sequence negative log-likelihood.
    pub(crate) fn loss_and_grad<S: AsRef<str>>(
        &self,
        toks: &[S],
        gold: &[usize],
        scale: F,
        grad: Option<&mut TaggerParams<F>>,
    ) -> F {
        let cache = self.forward_cached(toks);
        let n = toks.len();
        let k = self.tags.len();
        let mut d_scores = vec![vec![F::zero(); k]; n];
        let want_grad = grad.is_some();
        let mut grad = grad;
        let loss = match (&self.head, &self.params.crf) {
            (Head::Crf, Some(crf)) => {
                let crf_grad = grad.as_deref_mut().and_then(|g| g.crf.as_mut());
                crf.nll_backward(&cache.scores, gold, scale, crf_grad.map(|g| (g, &mut d_scores[..])))
            }
            _ => {
                let mut total = F::zero();
                let mut p = vec![F::zero(); k];
                for i in 0..n {
                    softmax_into(&cache.scores[i], &mut p);
                    total += log_sum_exp(&cache.scores[i]) - cache.scores[i][gold[i]];
                    if want_grad {
                        for j in 0..k {
                            d_scores[i][j] = scale * p[j];
                        }
                        d_scores[i][gold[i]] -= scale;
                    }
                }
                total
            }
        };
        if let Some(g) = grad {
            self.backprop(&cache, &d_scores, g);
        }
        loss
    }

    fn backprop(&self, cache: &ForwardCache<F>, d_scores: &[Vec<F>], g: &mut TaggerParams<F>) {
        let n = cache.hs.len();
        let half = self.dims.hidden / 2;
        let mut dh_fwd = vec![vec![F::zero(); half]; n];
        let mut dh_bwd = vec![vec![F::zero(); half]; n];
        for i in 0..n {
            g.out_w.add_outer(&d_scores[i], &cache.hs[i]);
            g.out_b.add_assign_slice(&d_scores[i]);
            let mut dh = vec![F::zero(); self.dims.hidden];
            self.params.out_w.mul_t_vec_acc(&d_scores[i], &mut dh);
            dh_fwd[i].copy_from_slice(&dh[..half]);
            dh_bwd[n - 1 - i].copy_from_slice(&dh[half..]);
        }
        let x_refs: Vec<&[F]> = cache.xs.iter().map(Vec::as_slice).collect();
        let mut dxs = vec![vec![F::zero(); self.dims.input()]; n];
        self.params.forward.backward(&x_refs, &cache.fwd, &dh_fwd, &mut g.forward, &mut dxs);
        let rev: Vec<&[F]> = x_refs.iter().rev().copied().collect();
        let mut dxs_rev = vec![vec![F::zero(); self.dims.input()]; n];
        self.params.backward.backward(&rev, &cache.bwd, &dh_bwd, &mut g.backward, &mut dxs_rev);
        let dw = self.dims.word_dim;
        for i in 0..n {
            let d_char: Vec<F> = dxs[i][dw..].iter().zip(&dxs_rev[n - 1 - i][dw..]).map(|(&a, &b)| a + b).collect();
            self.params
                .char_encoder
                .backward(&cache.trigrams[i], &cache.char_means[i], &d_char, &mut g.char_encoder);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(json)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }
}
