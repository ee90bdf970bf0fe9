//! Scalar abstraction shared by the numeric parts of the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable by the tagger, the selector and the metrics.
///
/// Implemented for `f32` and `f64`. Values are serialized natively, so an
/// `f64` model written to JSON reads back bit-for-bit.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, saturating to infinity when out of range.
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| if x > 0.0 { Self::infinity() } else { Self::neg_infinity() })
    }

    fn of_usize(x: usize) -> Self {
        Self::of(x as f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numerically stable softmax of `scores` into `out`.
pub fn softmax_into<F: Scalar>(scores: &[F], out: &mut [F]) {
    debug_assert_eq!(scores.len(), out.len());
    let max = scores.iter().copied().fold(F::neg_infinity(), F::max);
    let mut total = F::zero();
    for (o, &s) in out.iter_mut().zip(scores) {
        *o = (s - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

pub fn softmax<F: Scalar>(scores: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); scores.len()];
    softmax_into(scores, &mut out);
    out
}

/// `ln(Σ exp(x))` without overflow.
pub fn log_sum_exp<F: Scalar>(xs: &[F]) -> F {
    let max = xs.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let total: F = xs.iter().map(|&x| (x - max).exp()).sum();
    max + total.ln()
}

pub fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}
