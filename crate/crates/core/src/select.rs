//! Gradient boosted trees on logistic loss, and thresholded selection of
//! the best candidate table.

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, Error, Result};
use crate::features::{feature_fingerprint, featurize, FeatureVector, IdfTable, NUM_FEATURES};
use crate::query::TaggedQuery;
use crate::scalar::{sigmoid, Scalar};
use crate::table::{CandidatePool, WebTable};

pub const SELECTOR_FORMAT_VERSION: u32 = 1;

/// Regression tree; rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "F: Scalar")]
pub enum Tree<F> {
    Leaf {
        value: F,
    },
    Split {
        feature: usize,
        threshold: F,
        left: Box<Tree<F>>,
        right: Box<Tree<F>>,
    },
}

impl<F: Scalar> Tree<F> {
    pub fn eval(&self, x: &[F]) -> F {
        let mut node = self;
        loop {
            match node {
                Tree::Leaf { value } => return *value,
                Tree::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn features_valid(&self) -> bool {
        match self {
            Tree::Leaf { value } => value.is_finite(),
            Tree::Split {
                feature,
                threshold,
                left,
                right,
            } => *feature < NUM_FEATURES && threshold.is_finite() && left.features_valid() && right.features_valid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SelectorModel<F> {
    pub version: u32,
    pub fingerprint: String,
    pub learning_rate: F,
    /// Log-odds offset.
    pub base_score: F,
    pub trees: Vec<Tree<F>>,
}

impl<F: Scalar> SelectorModel<F> {
    /// A model without trees.
    pub fn constant(base_score: F, learning_rate: F) -> Self {
        SelectorModel {
            version: SELECTOR_FORMAT_VERSION,
            fingerprint: feature_fingerprint(),
            learning_rate,
            base_score,
            trees: Vec::new(),
        }
    }

    fn margin(&self, x: &[F]) -> F {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.eval(x)).sum::<F>()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SELECTOR_FORMAT_VERSION {
            return Err(Error::integrity(format!("unsupported selector version {}", self.version)));
        }
        if !self.trees.iter().all(Tree::features_valid) || !self.base_score.is_finite() || !self.learning_rate.is_finite() {
            return Err(Error::integrity("selector tree references an invalid feature or value"));
        }
        Ok(())
    }

    /// F(Q,T) ∈ (0,1).
    pub fn score(&self, fv: &FeatureVector<F>) -> Result<F> {
        if self.fingerprint != feature_fingerprint() {
            return Err(Error::contract(format!(
                "model feature fingerprint {} does not match {}",
                self.fingerprint,
                feature_fingerprint()
            )));
        }
        Ok(sigmoid(self.margin(fv.values())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(json)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    /// Row fraction sampled per round; 1 uses every row.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            rounds: 200,
            max_depth: 4,
            learning_rate: 0.1,
            min_samples_leaf: 1,
            subsample: 1.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedSelector<F> {
    pub model: SelectorModel<F>,
    /// Mean logistic loss before training and after each round.
    pub loss_trace: Vec<F>,
}

fn log_loss<F: Scalar>(margins: &[F], labels: &[F]) -> F {
    let mut total = F::zero();
    for (&m, &y) in margins.iter().zip(labels) {
        // log(1 + e^m) - y m, stably.
        let softplus = if m > F::zero() { m + (-m).exp().ln_1p() } else { m.exp().ln_1p() };
        total += softplus - y * m;
    }
    total / F::of_usize(margins.len())
}

pub fn train_selector<F: Scalar>(data: &[(FeatureVector<F>, u8)], config: &SelectorConfig) -> Result<TrainedSelector<F>> {
    if data.iter().any(|(_, y)| *y > 1) {
        return Err(Error::data("labels must be 0 or 1"));
    }
    let positives = data.iter().filter(|(_, y)| *y == 1).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::data("selector training needs at least one example of each class"));
    }
    if !(config.learning_rate > 0.0) || config.min_samples_leaf == 0 || !(config.subsample > 0.0 && config.subsample <= 1.0) {
        return Err(Error::config("learning_rate and subsample must lie in (0, 1], min_samples_leaf must be positive"));
    }
    let xs: Vec<&[F]> = data.iter().map(|(fv, _)| fv.values()).collect();
    let ys: Vec<F> = data.iter().map(|(_, y)| F::of(f64::from(*y))).collect();
    let p = positives as f64 / data.len() as f64;
    let eta = F::of(config.learning_rate);
    let mut model = SelectorModel::constant(F::of((p / (1.0 - p)).ln()), eta);
    let mut margins = vec![model.base_score; data.len()];
    let mut loss_trace = vec![log_loss(&margins, &ys)];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_sample = ((data.len() as f64 * config.subsample).round() as usize).max(1);

    for _ in 0..config.rounds {
        let probs: Vec<F> = margins.iter().map(|&m| sigmoid(m)).collect();
        let residuals: Vec<F> = probs.iter().zip(&ys).map(|(&p, &y)| y - p).collect();
        let hessians: Vec<F> = probs.iter().map(|&p| p * (F::one() - p)).collect();
        let mut rows: Vec<usize> = if n_sample < data.len() {
            sample(&mut rng, data.len(), n_sample).into_vec()
        } else {
            (0..data.len()).collect()
        };
        rows.sort_unstable();
        let tree = grow(&xs, &residuals, &hessians, rows, config.max_depth, config.min_samples_leaf);
        for (m, x) in margins.iter_mut().zip(&xs) {
            *m += eta * tree.eval(x);
        }
        model.trees.push(tree);
        loss_trace.push(log_loss(&margins, &ys));
    }
    Ok(TrainedSelector { model, loss_trace })
}

/// Newton step `Σ r / Σ p(1-p)` for the rows of one leaf.
fn newton_value<F: Scalar>(r: &[F], h: &[F], rows: &[usize]) -> F {
    let num: F = rows.iter().map(|&i| r[i]).sum();
    let den: F = rows.iter().map(|&i| h[i]).sum();
    num / den.max(F::of(1e-12))
}

/// Exact greedy least-squares tree on `residuals` with Newton leaves.
fn grow<F: Scalar>(xs: &[&[F]], residuals: &[F], hessians: &[F], rows: Vec<usize>, depth: usize, min_leaf: usize) -> Tree<F> {
    let leaf = || Tree::Leaf {
        value: newton_value(residuals, hessians, &rows),
    };
    if depth == 0 || rows.len() < 2 * min_leaf {
        return leaf();
    }
    let total: F = rows.iter().map(|&i| residuals[i]).sum();
    let n = F::of_usize(rows.len());
    let base = total * total / n;
    let mut best: Option<(F, usize, F)> = None;
    let mut sorted = rows.clone();
    for f in 0..NUM_FEATURES {
        sorted.sort_by(|&a, &b| xs[a][f].partial_cmp(&xs[b][f]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let mut left_sum = F::zero();
        for k in 0..sorted.len() - 1 {
            left_sum += residuals[sorted[k]];
            let (lo, hi) = (xs[sorted[k]][f], xs[sorted[k + 1]][f]);
            let n_left = k + 1;
            if lo == hi || n_left < min_leaf || sorted.len() - n_left < min_leaf {
                continue;
            }
            let nl = F::of_usize(n_left);
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / nl + right_sum * right_sum / (n - nl) - base;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, f, (lo + hi) / F::of(2.0)));
            }
        }
    }
    match best {
        Some((gain, feature, threshold)) if gain > F::of(1e-12) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| xs[i][feature] <= threshold);
            Tree::Split {
                feature,
                threshold,
                left: Box::new(grow(xs, residuals, hessians, l, depth - 1, min_leaf)),
                right: Box::new(grow(xs, residuals, hessians, r, depth - 1, min_leaf)),
            }
        }
        _ => leaf(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<F> {
    pub best_index: Option<usize>,
    pub best_table: Option<WebTable>,
    /// Highest score, or 0 for an empty pool.
    pub best_score: F,
    pub all_scores: Vec<F>,
}

/// Index of the highest score; ties go to the lower `sr_rank`, then the
/// earlier candidate. `None` when the best score is not above `theta`.
pub fn pick_best<F: Scalar>(scores: &[F], sr_ranks: &[u32], theta: F) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..scores.len() {
        best = match best {
            None => Some(i),
            Some(b) if scores[i] > scores[b] || (scores[i] == scores[b] && sr_ranks[i] < sr_ranks[b]) => Some(i),
            keep => keep,
        };
    }
    best.filter(|&b| scores[b] > theta)
}

pub fn select_answer<F: Scalar>(
    tq: &TaggedQuery,
    pool: &CandidatePool,
    model: &SelectorModel<F>,
    theta: F,
    idf: &IdfTable,
) -> Result<SelectionResult<F>> {
    if !(theta > F::zero() && theta < F::one()) {
        return Err(Error::contract(format!("theta must lie in (0, 1), got {theta}")));
    }
    let all_scores = pool
        .tables
        .iter()
        .map(|t| model.score(&featurize(tq, t, idf)))
        .collect::<Result<Vec<F>>>()?;
    let ranks: Vec<u32> = pool.tables.iter().map(|t| t.doc.sr_rank).collect();
    let best_index = pick_best(&all_scores, &ranks, theta);
    let best_score = pick_best(&all_scores, &ranks, F::neg_infinity()).map_or(F::zero(), |i| all_scores[i]);
    Ok(SelectionResult {
        best_index,
        best_table: best_index.map(|i| pool.tables[i].clone()),
        best_score,
        all_scores,
    })
}

/// JSON payload of a selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutput {
    pub query: String,
    pub answer_table_ref: Option<String>,
    pub score: f64,
    pub threshold: f64,
}

impl SelectionOutput {
    pub fn new<F: Scalar>(query: &str, result: &SelectionResult<F>, theta: F) -> Self {
        SelectionOutput {
            query: query.to_string(),
            answer_table_ref: result.best_table.as_ref().map(WebTable::reference),
            score: result.best_score.as_f64(),
            threshold: theta.as_f64(),
        }
    }
}
