//! Linear-chain CRF head over per-token emission scores.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::scalar::{log_sum_exp, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct CrfParams<F> {
    /// `trans[a][b]` scores tag `a` followed by tag `b`.
    pub trans: Matrix<F>,
    pub start: Matrix<F>,
    pub end: Matrix<F>,
}

/// Posterior quantities of one sequence.
pub(crate) struct Posterior<F> {
    pub log_z: F,
    pub alpha: Vec<Vec<F>>,
    pub beta: Vec<Vec<F>>,
}

impl<F: Scalar> CrfParams<F> {
    pub fn zeros(tags: usize) -> Self {
        CrfParams {
            trans: Matrix::zeros(tags, tags),
            start: Matrix::column(tags),
            end: Matrix::column(tags),
        }
    }

    pub fn tags(&self) -> usize {
        self.start.rows
    }

    pub fn is_consistent(&self) -> bool {
        let k = self.tags();
        self.trans.rows == k && self.trans.cols == k && self.end.rows == k && self.trans.is_consistent()
    }

    pub(crate) fn posterior(&self, emissions: &[Vec<F>]) -> Posterior<F> {
        let k = self.tags();
        let n = emissions.len();
        let mut alpha = vec![vec![F::zero(); k]; n];
        let mut beta = vec![vec![F::zero(); k]; n];
        let mut buf = vec![F::zero(); k];
        for b in 0..k {
            alpha[0][b] = self.start.data[b] + emissions[0][b];
        }
        for i in 1..n {
            for b in 0..k {
                for a in 0..k {
                    buf[a] = alpha[i - 1][a] + self.trans.get(a, b);
                }
                alpha[i][b] = emissions[i][b] + log_sum_exp(&buf);
            }
        }
        for a in 0..k {
            beta[n - 1][a] = self.end.data[a];
        }
        for i in (0..n - 1).rev() {
            for a in 0..k {
                for b in 0..k {
                    buf[b] = self.trans.get(a, b) + emissions[i + 1][b] + beta[i + 1][b];
                }
                beta[i][a] = log_sum_exp(&buf);
            }
        }
        for a in 0..k {
            buf[a] = alpha[n - 1][a] + self.end.data[a];
        }
        let log_z = log_sum_exp(&buf);
        Posterior { log_z, alpha, beta }
    }

    /// Per-token marginal tag probabilities.
    pub fn marginals(&self, emissions: &[Vec<F>]) -> Vec<Vec<F>> {
        let post = self.posterior(emissions);
        marginals_from(&post)
    }

    pub fn path_score(&self, emissions: &[Vec<F>], path: &[usize]) -> F {
        let mut s = self.start.data[path[0]] + self.end.data[path[path.len() - 1]];
        for (i, &y) in path.iter().enumerate() {
            s += emissions[i][y];
            if i > 0 {
                s += self.trans.get(path[i - 1], y);
            }
        }
        s
    }

    /// Negative log-likelihood of `gold`; accumulates `scale ×` gradients
    /// into `grad` and the emission gradients into `d_emit`.
    pub(crate) fn nll_backward(
        &self,
        emissions: &[Vec<F>],
        gold: &[usize],
        scale: F,
        grad: Option<(&mut CrfParams<F>, &mut [Vec<F>])>,
    ) -> F {
        let post = self.posterior(emissions);
        let nll = post.log_z - self.path_score(emissions, gold);
        let Some((g, d_emit)) = grad else {
            return nll;
        };
        let k = self.tags();
        let n = emissions.len();
        let marg = marginals_from(&post);
        for i in 0..n {
            for y in 0..k {
                d_emit[i][y] += scale * marg[i][y];
            }
            d_emit[i][gold[i]] -= scale;
        }
        for y in 0..k {
            g.start.data[y] += scale * marg[0][y];
            g.end.data[y] += scale * marg[n - 1][y];
        }
        g.start.data[gold[0]] -= scale;
        g.end.data[gold[n - 1]] -= scale;
        for i in 1..n {
            for a in 0..k {
                for b in 0..k {
                    let lp = post.alpha[i - 1][a] + self.trans.get(a, b) + emissions[i][b] + post.beta[i][b] - post.log_z;
                    g.trans.data[a * k + b] += scale * lp.exp();
                }
            }
            g.trans.data[gold[i - 1] * k + gold[i]] -= scale;
        }
        nll
    }

    /// Highest-scoring tag path.
    pub fn viterbi(&self, emissions: &[Vec<F>]) -> Vec<usize> {
        let k = self.tags();
        let n = emissions.len();
        let mut score: Vec<F> = (0..k).map(|b| self.start.data[b] + emissions[0][b]).collect();
        let mut back = vec![vec![0usize; k]; n];
        for i in 1..n {
            let mut next = vec![F::zero(); k];
            for b in 0..k {
                let mut best = 0;
                for a in 1..k {
                    if score[a] + self.trans.get(a, b) > score[best] + self.trans.get(best, b) {
                        best = a;
                    }
                }
                back[i][b] = best;
                next[b] = score[best] + self.trans.get(best, b) + emissions[i][b];
            }
            score = next;
        }
        let mut last = 0;
        for b in 1..k {
            if score[b] + self.end.data[b] > score[last] + self.end.data[last] {
                last = b;
            }
        }
        let mut path = vec![last; n];
        for i in (1..n).rev() {
            path[i - 1] = back[i][path[i]];
        }
        path
    }
}

fn marginals_from<F: Scalar>(post: &Posterior<F>) -> Vec<Vec<F>> {
    post.alpha
        .iter()
        .zip(&post.beta)
        .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x + y - post.log_z).exp()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_paths(k: usize, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..k).map(move |y| {
                        let mut q = p.clone();
                        q.push(y);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn sample() -> (CrfParams<f64>, Vec<Vec<f64>>) {
        let mut crf = CrfParams::zeros(3);
        for (i, v) in crf.trans.data.iter_mut().enumerate() {
            *v = ((i * 7 % 5) as f64 - 2.0) * 0.3;
        }
        crf.start.data = vec![0.1, -0.2, 0.3];
        crf.end.data = vec![-0.1, 0.4, 0.0];
        let emissions = vec![vec![0.5, -1.0, 0.2], vec![0.0, 0.3, -0.4], vec![1.2, 0.1, 0.0], vec![-0.3, 0.8, 0.6]];
        (crf, emissions)
    }

    #[test]
    fn partition_function_matches_enumeration() {
        let (crf, em) = sample();
        let scores: Vec<f64> = all_paths(3, em.len()).iter().map(|p| crf.path_score(&em, p)).collect();
        let brute = log_sum_exp(&scores);
        assert!((crf.posterior(&em).log_z - brute).abs() < 1e-12);
    }

    #[test]
    fn marginals_match_enumeration() {
        let (crf, em) = sample();
        let paths = all_paths(3, em.len());
        let log_z = crf.posterior(&em).log_z;
        let marg = crf.marginals(&em);
        for i in 0..em.len() {
            for y in 0..3 {
                let brute: f64 = paths
                    .iter()
                    .filter(|p| p[i] == y)
                    .map(|p| (crf.path_score(&em, p) - log_z).exp())
                    .sum();
                assert!((marg[i][y] - brute).abs() < 1e-12);
            }
            assert!((marg[i].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn viterbi_matches_enumeration() {
        let (crf, em) = sample();
        let best = all_paths(3, em.len())
            .into_iter()
            .max_by(|a, b| crf.path_score(&em, a).partial_cmp(&crf.path_score(&em, b)).unwrap())
            .unwrap();
        assert_eq!(crf.viterbi(&em), best);
    }
}
