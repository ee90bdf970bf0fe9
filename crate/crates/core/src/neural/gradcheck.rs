use super::model::TaggerModel;
use super::train::{encode_tags, LabeledSequence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Largest `|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)`.
    pub max_rel_error: f64,
    /// Tensor index and flat element index of the worst parameter.
    pub worst: (usize, usize),
    pub checked: usize,
}

/// Compares backprop gradients of the mean per-token loss against central
/// differences with step `eps`, over every parameter.
pub fn gradient_check(model: &TaggerModel<f64>, example: &LabeledSequence, eps: f64) -> Result<GradCheckReport> {
    if !(eps > 0.0) {
        return Err(Error::contract("finite-difference step must be positive"));
    }
    model.validate()?;
    let gold = encode_tags(&model.tags, example)?;
    let scale = 1.0 / example.len() as f64;
    let mut grad = model.params.zeros_like();
    model.loss_and_grad(&example.tokens, &gold, scale, Some(&mut grad));

    let mut probe = model.clone();
    let analytic = grad.tensors();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: (0, 0),
        checked: 0,
    };
    for (t, ga) in analytic.iter().enumerate() {
        for e in 0..ga.data.len() {
            let orig = probe.params.tensors_mut()[t].data[e];
            probe.params.tensors_mut()[t].data[e] = orig + eps;
            let up = probe.loss_and_grad(&example.tokens, &gold, scale, None) * scale;
            probe.params.tensors_mut()[t].data[e] = orig - eps;
            let down = probe.loss_and_grad(&example.tokens, &gold, scale, None) * scale;
            probe.params.tensors_mut()[t].data[e] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let a = ga.data[e];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            if rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst = (t, e);
            }
            report.checked += 1;
        }
    }
    Ok(report)
}
