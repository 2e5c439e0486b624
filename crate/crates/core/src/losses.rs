//! Reconstruction and diversity losses over a prediction tensor, each with an
//! analytic (sub)gradient with respect to every predicted coordinate.
//!
//! Gradients are laid out like [`PredictionSet::as_flat`] with x and y
//! interleaved: index `((k * N + n) * T + t) * 2 + {0, 1}`. Min terms route
//! gradient only to their minimizing sample; ties go to the lowest index.
//!
//! The losses use squared norms, unlike the displacement metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::argmin;
use crate::trajdata::{Position, PredictionSet, Sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    #[default]
    Sum,
    /// Divide reconstruction terms by (timesteps used × N).
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub use_general_recon: bool,
    pub use_marginal: bool,
    pub use_joint: bool,
    /// Weight on the joint term.
    pub joint_weight: f64,
    /// Diversity temperature; the diversity term is on when set.
    pub diversity_sigma: Option<f64>,
    /// 1-based timesteps the reconstruction terms look at (coarse waypoint
    /// loss). Setting it also normalizes by `|subset| * N`.
    pub timestep_subset: Option<Vec<usize>>,
    pub reduction: Reduction,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            use_general_recon: false,
            use_marginal: true,
            use_joint: false,
            joint_weight: 1.0,
            diversity_sigma: None,
            timestep_subset: None,
            reduction: Reduction::Sum,
        }
    }
}

impl LossConfig {
    pub fn marginal_only() -> Self {
        LossConfig::default()
    }

    pub fn joint_only() -> Self {
        LossConfig {
            use_marginal: false,
            use_joint: true,
            ..LossConfig::default()
        }
    }

    pub fn marginal_and_joint(joint_weight: f64) -> Self {
        LossConfig {
            use_joint: true,
            joint_weight,
            ..LossConfig::default()
        }
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn validate(&self, pred_len: usize) -> Result<()> {
        if !(self.use_general_recon || self.use_marginal || self.use_joint || self.diversity_sigma.is_some()) {
            return Err(Error::Config("at least one loss term must be enabled".into()));
        }
        if !(self.joint_weight >= 0.0 && self.joint_weight.is_finite()) {
            return Err(Error::Config(format!(
                "joint weight must be finite and >= 0, got {}",
                self.joint_weight
            )));
        }
        if let Some(sigma) = self.diversity_sigma {
            if !(sigma > 0.0) {
                return Err(Error::Config(format!("diversity sigma must be > 0, got {sigma}")));
            }
        }
        if let Some(subset) = &self.timestep_subset {
            let mut sorted = subset.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if subset.is_empty() || sorted.len() != subset.len() || subset.iter().any(|&t| t == 0 || t > pred_len) {
                return Err(Error::Config(format!(
                    "timestep subset must be a non-empty subset of 1..={pred_len}"
                )));
            }
        }
        Ok(())
    }
}

/// Which samples the min terms selected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActiveSamples {
    /// Per-agent argmin of the marginal term.
    pub marginal: Option<Vec<usize>>,
    /// Argmin of the joint term.
    pub joint: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub value: f64,
    /// K×N×T×2, see module docs for layout.
    pub grad: Vec<f64>,
    pub active: ActiveSamples,
}

impl LossOutput {
    fn zeros(pred: &PredictionSet) -> Self {
        LossOutput {
            value: 0.0,
            grad: vec![0.0; pred.as_flat().len() * 2],
            active: ActiveSamples::default(),
        }
    }

    fn add_scaled(&mut self, other: &LossOutput, w: f64) {
        self.value += w * other.value;
        for (g, o) in self.grad.iter_mut().zip(&other.grad) {
            *g += w * o;
        }
        if other.active.marginal.is_some() {
            self.active.marginal.clone_from(&other.active.marginal);
        }
        if other.active.joint.is_some() {
            self.active.joint = other.active.joint;
        }
    }
}

fn grad_index(pred: &PredictionSet, k: usize, n: usize, t: usize) -> usize {
    ((k * pred.num_agents() + n) * pred.pred_len() + t) * 2
}

/// 0-based timesteps to use.
fn timesteps(pred_len: usize, subset: Option<&[usize]>) -> Vec<usize> {
    match subset {
        Some(s) => s.iter().map(|t| t - 1).collect(),
        None => (0..pred_len).collect(),
    }
}

/// `costs[k][n]` = Σ_t ‖y − y*‖² over the chosen timesteps.
fn agent_costs(pred: &PredictionSet, gt: &Sequence, steps: &[usize]) -> Vec<Vec<f64>> {
    (0..pred.num_samples())
        .map(|k| {
            (0..pred.num_agents())
                .map(|n| {
                    let truth = gt.future_track(n);
                    steps.iter().map(|&t| pred.get(k, n, t).dist_sq(truth[t])).sum()
                })
                .collect()
        })
        .collect()
}

fn add_agent_grad(out: &mut LossOutput, pred: &PredictionSet, gt: &Sequence, k: usize, n: usize, steps: &[usize]) {
    let truth = gt.future_track(n);
    for &t in steps {
        let d: Position = pred.get(k, n, t) - truth[t];
        let i = grad_index(pred, k, n, t);
        out.grad[i] += 2.0 * d.x;
        out.grad[i + 1] += 2.0 * d.y;
    }
}

fn check(pred: &PredictionSet, gt: &Sequence) -> Result<()> {
    pred.check_matches(gt)
}

fn marginal_on(pred: &PredictionSet, gt: &Sequence, steps: &[usize]) -> LossOutput {
    let costs = agent_costs(pred, gt, steps);
    let mut out = LossOutput::zeros(pred);
    let mut picks = Vec::with_capacity(pred.num_agents());
    for n in 0..pred.num_agents() {
        let (k, v) = argmin(costs.iter().map(|row| row[n]));
        out.value += v;
        add_agent_grad(&mut out, pred, gt, k, n, steps);
        picks.push(k);
    }
    out.active.marginal = Some(picks);
    out
}

fn joint_on(pred: &PredictionSet, gt: &Sequence, steps: &[usize]) -> LossOutput {
    let costs = agent_costs(pred, gt, steps);
    let (k, v) = argmin(costs.iter().map(|row| row.iter().sum::<f64>()));
    let mut out = LossOutput::zeros(pred);
    out.value = v;
    for n in 0..pred.num_agents() {
        add_agent_grad(&mut out, pred, gt, k, n, steps);
    }
    out.active.joint = Some(k);
    out
}

fn general_on(pred: &PredictionSet, gt: &Sequence, steps: &[usize]) -> LossOutput {
    let mut out = LossOutput::zeros(pred);
    let costs = agent_costs(pred, gt, steps);
    out.value = costs[0].iter().sum();
    for n in 0..pred.num_agents() {
        add_agent_grad(&mut out, pred, gt, 0, n, steps);
    }
    out
}

/// Σ_n min_k Σ_t ‖y − y*‖².
pub fn marginal_recon(pred: &PredictionSet, gt: &Sequence) -> Result<LossOutput> {
    check(pred, gt)?;
    Ok(marginal_on(pred, gt, &timesteps(pred.pred_len(), None)))
}

/// min_k Σ_n Σ_t ‖y − y*‖².
pub fn joint_recon(pred: &PredictionSet, gt: &Sequence) -> Result<LossOutput> {
    check(pred, gt)?;
    Ok(joint_on(pred, gt, &timesteps(pred.pred_len(), None)))
}

/// Σ_n Σ_t ‖y⁽⁰⁾ − y*‖², sample 0 only.
pub fn general_recon(pred: &PredictionSet, gt: &Sequence) -> Result<LossOutput> {
    check(pred, gt)?;
    Ok(general_on(pred, gt, &timesteps(pred.pred_len(), None)))
}

/// Mean over ordered sample pairs of exp(−‖y⁽ᵃ⁾ − y⁽ᵇ⁾‖ / σ), the norm taken
/// over the whole flattened joint sample. Coincident pairs contribute zero
/// gradient.
pub fn diversity(pred: &PredictionSet, sigma: f64) -> Result<LossOutput> {
    let k_total = pred.num_samples();
    if k_total < 2 {
        return Err(Error::Config("diversity needs at least 2 samples".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("diversity sigma must be > 0, got {sigma}")));
    }
    let mut out = LossOutput::zeros(pred);
    let pairs = (k_total * (k_total - 1)) as f64;
    for a in 0..k_total {
        for b in a + 1..k_total {
            let (sa, sb) = (pred.sample(a), pred.sample(b));
            let dist = sa.iter().zip(sb).map(|(p, q)| p.dist_sq(*q)).sum::<f64>().sqrt();
            let e = (-dist / sigma).exp();
            // both orders (a, b) and (b, a)
            out.value += 2.0 * e / pairs;
            if dist == 0.0 {
                continue;
            }
            let scale = -2.0 * e / (sigma * dist * pairs);
            let stride = pred.num_agents() * pred.pred_len() * 2;
            for (i, (p, q)) in sa.iter().zip(sb).enumerate() {
                let d = *p - *q;
                let ia = a * stride + 2 * i;
                let ib = b * stride + 2 * i;
                out.grad[ia] += scale * d.x;
                out.grad[ia + 1] += scale * d.y;
                out.grad[ib] -= scale * d.x;
                out.grad[ib + 1] -= scale * d.y;
            }
        }
    }
    Ok(out)
}

/// Sum of the enabled terms, joint term scaled by `joint_weight`.
pub fn combined_loss(pred: &PredictionSet, gt: &Sequence, cfg: &LossConfig) -> Result<LossOutput> {
    check(pred, gt)?;
    cfg.validate(pred.pred_len())?;
    let steps = timesteps(pred.pred_len(), cfg.timestep_subset.as_deref());
    let norm = if cfg.timestep_subset.is_some() || cfg.reduction == Reduction::Mean {
        1.0 / (steps.len() * pred.num_agents()) as f64
    } else {
        1.0
    };
    let mut out = LossOutput::zeros(pred);
    if cfg.use_general_recon {
        out.add_scaled(&general_on(pred, gt, &steps), norm);
    }
    if cfg.use_marginal {
        out.add_scaled(&marginal_on(pred, gt, &steps), norm);
    }
    if cfg.use_joint {
        out.add_scaled(&joint_on(pred, gt, &steps), cfg.joint_weight * norm);
    }
    if let Some(sigma) = cfg.diversity_sigma {
        out.add_scaled(&diversity(pred, sigma)?, 1.0);
    }
    Ok(out)
}
