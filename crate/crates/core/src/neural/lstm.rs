use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::scalar::{sigmoid, Scalar};

/// One LSTM direction. Gate blocks are stacked in the order
/// input, forget, output, candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Lstm<F> {
    /// `4h × n` input weights.
    pub w: Matrix<F>,
    /// `4h × h` recurrent weights.
    pub u: Matrix<F>,
    /// `4h × 1` bias.
    pub b: Matrix<F>,
}

/// Activations kept from the forward pass of one time step.
#[derive(Debug, Clone)]
pub(crate) struct LstmStep<F> {
    /// Activated gates `[i, f, o, g]`, each of length h.
    gates: Vec<F>,
    c: Vec<F>,
    tanh_c: Vec<F>,
    pub(crate) h: Vec<F>,
}

impl<F: Scalar> Lstm<F> {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Lstm {
            w: Matrix::zeros(4 * hidden, input),
            u: Matrix::zeros(4 * hidden, hidden),
            b: Matrix::column(4 * hidden),
        }
    }

    pub fn hidden(&self) -> usize {
        self.u.cols
    }

    pub fn input(&self) -> usize {
        self.w.cols
    }

    pub fn is_consistent(&self) -> bool {
        let h = self.hidden();
        self.w.rows == 4 * h
            && self.u.rows == 4 * h
            && self.b.rows == 4 * h
            && self.b.cols == 1
            && self.w.is_consistent()
            && self.u.is_consistent()
            && self.b.is_consistent()
    }

    /// Runs the cell over `xs` in the given order, from zero state.
    pub(crate) fn forward(&self, xs: &[&[F]]) -> Vec<LstmStep<F>> {
        let h = self.hidden();
        let mut steps: Vec<LstmStep<F>> = Vec::with_capacity(xs.len());
        let zeros = vec![F::zero(); h];
        for x in xs {
            let (h_prev, c_prev) = match steps.last() {
                Some(s) => (&s.h[..], &s.c[..]),
                None => (&zeros[..], &zeros[..]),
            };
            let mut z = self.b.data.clone();
            self.w.mul_vec_acc(x, &mut z);
            self.u.mul_vec_acc(h_prev, &mut z);
            for v in &mut z[..3 * h] {
                *v = sigmoid(*v);
            }
            for v in &mut z[3 * h..] {
                *v = v.tanh();
            }
            let mut c = vec![F::zero(); h];
            let mut tanh_c = vec![F::zero(); h];
            let mut h_new = vec![F::zero(); h];
            for j in 0..h {
                let (i, f, o, g) = (z[j], z[h + j], z[2 * h + j], z[3 * h + j]);
                c[j] = f * c_prev[j] + i * g;
                tanh_c[j] = c[j].tanh();
                h_new[j] = o * tanh_c[j];
            }
            steps.push(LstmStep {
                gates: z,
                c,
                tanh_c,
                h: h_new,
            });
        }
        steps
    }

    /// Backpropagation through time.
    ///
    /// `dh[t]` is the loss gradient w.r.t. the output at step `t`; input
    /// gradients are accumulated into `dxs[t]`.
    pub(crate) fn backward(
        &self,
        xs: &[&[F]],
        steps: &[LstmStep<F>],
        dh: &[Vec<F>],
        grad: &mut Lstm<F>,
        dxs: &mut [Vec<F>],
    ) {
        let h = self.hidden();
        let zeros = vec![F::zero(); h];
        let mut dh_next = vec![F::zero(); h];
        let mut dc_next = vec![F::zero(); h];
        let mut dz = vec![F::zero(); 4 * h];
        let one = F::one();
        for t in (0..steps.len()).rev() {
            let step = &steps[t];
            let (h_prev, c_prev) = if t > 0 {
                (&steps[t - 1].h[..], &steps[t - 1].c[..])
            } else {
                (&zeros[..], &zeros[..])
            };
            let z = &step.gates;
            for j in 0..h {
                let (i, f, o, g) = (z[j], z[h + j], z[2 * h + j], z[3 * h + j]);
                let dhj = dh[t][j] + dh_next[j];
                let tc = step.tanh_c[j];
                let dc = dc_next[j] + dhj * o * (one - tc * tc);
                dz[j] = dc * g * i * (one - i);
                dz[h + j] = dc * c_prev[j] * f * (one - f);
                dz[2 * h + j] = dhj * tc * o * (one - o);
                dz[3 * h + j] = dc * i * (one - g * g);
                dc_next[j] = dc * f;
            }
            grad.w.add_outer(&dz, xs[t]);
            grad.u.add_outer(&dz, h_prev);
            grad.b.add_assign_slice(&dz);
            self.w.mul_t_vec_acc(&dz, &mut dxs[t]);
            dh_next.iter_mut().for_each(|v| *v = F::zero());
            self.u.mul_t_vec_acc(&dz, &mut dh_next);
        }
    }
}
