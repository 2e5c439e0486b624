//! Flat-array entry points for foreign callers (e.g. a Python extension).
//!
//! Predictions are a contiguous `(K, N, T, 2)` buffer and ground truth an
//! `(N, T, 2)` buffer, both C-order. No math lives here: inputs are
//! validated, wrapped and handed to [`crate::metrics`] and
//! [`crate::losses`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::losses::{combined_loss, LossConfig};
use crate::metrics::{evaluate_sequence, EvalConfig};
use crate::trajdata::{Position, PredictionSet, Sequence, Units};

fn to_positions(buf: &[f64]) -> Vec<Position> {
    buf.chunks_exact(2).map(|c| Position::new(c[0], c[1])).collect()
}

fn wrap(pred: &[f64], pred_shape: [usize; 4], gt: &[f64], gt_shape: [usize; 3]) -> Result<(PredictionSet, Sequence)> {
    let [k, n, t, d] = pred_shape;
    let [gn, gtl, gd] = gt_shape;
    if d != 2 || gd != 2 || n != gn || t != gtl {
        return Err(Error::shape(
            "array inputs",
            format!("pred (K, N, T, 2) with gt (N, T, 2); got gt {gt_shape:?}"),
            format!("pred {pred_shape:?}"),
        ));
    }
    if pred.len() != k * n * t * 2 {
        return Err(Error::shape("prediction buffer", k * n * t * 2, pred.len()));
    }
    if gt.len() != n * t * 2 {
        return Err(Error::shape("ground-truth buffer", n * t * 2, gt.len()));
    }
    let future = to_positions(gt);
    // metrics and losses never read the history; a single frame keeps the
    // sequence well-formed
    let obs: Vec<Position> = (0..n).map(|a| future[a * t]).collect();
    let seq = Sequence::new(
        "array",
        "array",
        2.5,
        Units::Meters,
        (0..n as i64).collect(),
        1,
        obs,
        t,
        future,
    )?;
    let set = PredictionSet::new("array", k, n, t, to_positions(pred))?;
    Ok((set, seq))
}

/// Requested metrics for one scene given as flat arrays.
pub fn metrics_from_arrays(
    pred: &[f64],
    pred_shape: [usize; 4],
    gt: &[f64],
    gt_shape: [usize; 3],
    cfg: &EvalConfig,
) -> Result<BTreeMap<String, f64>> {
    let (set, seq) = wrap(pred, pred_shape, gt, gt_shape)?;
    Ok(evaluate_sequence(&set, &seq, cfg)?.per_metric)
}

/// Combined loss value and its gradient in the caller's `(K, N, T, 2)`
/// layout.
pub fn losses_from_arrays(
    pred: &[f64],
    pred_shape: [usize; 4],
    gt: &[f64],
    gt_shape: [usize; 3],
    cfg: &LossConfig,
) -> Result<(f64, Vec<f64>)> {
    let (set, seq) = wrap(pred, pred_shape, gt, gt_shape)?;
    let out = combined_loss(&set, &seq, cfg)?;
    Ok((out.value, out.grad))
}
