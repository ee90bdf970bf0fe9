use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::scalar::Scalar;

/// Bag of hashed character trigrams, averaged and linearly projected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct CharEncoder<F> {
    /// One row per hash bucket.
    pub table: Matrix<F>,
    /// `dc × dc` projection applied to the averaged trigram vector.
    pub proj: Matrix<F>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Bucket ids of the trigrams of `^token$`; never empty.
pub fn trigram_buckets(token: &str, buckets: usize) -> Vec<usize> {
    let padded: Vec<char> = std::iter::once('^').chain(token.chars()).chain(std::iter::once('$')).collect();
    let bucket = |gram: &[char]| {
        let s: String = gram.iter().collect();
        (fnv1a(s.as_bytes()) % buckets as u64) as usize
    };
    if padded.len() < 3 {
        return vec![bucket(&padded)];
    }
    padded.windows(3).map(bucket).collect()
}

impl<F: Scalar> CharEncoder<F> {
    pub fn zeros(buckets: usize, dim: usize) -> Self {
        CharEncoder {
            table: Matrix::zeros(buckets, dim),
            proj: Matrix::zeros(dim, dim),
        }
    }

    pub fn buckets(&self) -> usize {
        self.table.rows
    }

    pub fn dim(&self) -> usize {
        self.table.cols
    }

    /// Averaged trigram vector of the given buckets.
    pub fn mean(&self, ids: &[usize]) -> Vec<F> {
        let mut m = vec![F::zero(); self.dim()];
        for &id in ids {
            for (acc, &v) in m.iter_mut().zip(self.table.row(id)) {
                *acc += v;
            }
        }
        let n = F::of_usize(ids.len());
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Encodes `token` into `out` (length `dc`).
    pub fn encode_into(&self, token: &str, out: &mut [F]) {
        let ids = trigram_buckets(token, self.buckets());
        let m = self.mean(&ids);
        out.iter_mut().for_each(|v| *v = F::zero());
        self.proj.mul_vec_acc(&m, out);
    }

    pub fn encode(&self, token: &str) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        self.encode_into(token, &mut out);
        out
    }

    /// Accumulates gradients given the upstream gradient of the output.
    pub(crate) fn backward(&self, ids: &[usize], mean: &[F], d_out: &[F], grad: &mut CharEncoder<F>) {
        grad.proj.add_outer(d_out, mean);
        let mut d_mean = vec![F::zero(); self.dim()];
        self.proj.mul_t_vec_acc(d_out, &mut d_mean);
        let n = F::of_usize(ids.len());
        for &id in ids {
            for (g, &d) in grad.table.row_mut(id).iter_mut().zip(&d_mean) {
                *g += d / n;
            }
        }
    }
}
