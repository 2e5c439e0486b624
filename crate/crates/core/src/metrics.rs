//! Marginal and joint displacement metrics, collision rates, KDE-NLL, and
//! dataset-level aggregation.
//!
//! Marginal metrics (ADE/FDE) take the best sample per agent; joint metrics
//! (JADE/JFDE) take the best sample for the scene as a whole, so one sample
//! has to be good for every agent at once. Displacements are unsquared
//! Euclidean distances unless [`DistanceMode::Squared`] is requested.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{collision_flags, DEFAULT_RADIUS};
use crate::trajdata::{Position, PredictionSet, Sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    #[default]
    Euclidean,
    Squared,
}

impl DistanceMode {
    fn error(self, a: Position, b: Position) -> f64 {
        match self {
            DistanceMode::Euclidean => a.dist(b),
            DistanceMode::Squared => a.dist_sq(b),
        }
    }
}

fn check_shapes(pred: &PredictionSet, gt: &Sequence) -> Result<()> {
    pred.check_matches(gt)
}

/// `errors[k][n]` = summed displacement over all timesteps of agent `n` in
/// sample `k`.
fn summed_errors(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Vec<Vec<f64>> {
    (0..pred.num_samples())
        .map(|k| {
            (0..pred.num_agents())
                .map(|n| {
                    pred.track(k, n)
                        .iter()
                        .zip(gt.future_track(n))
                        .map(|(p, g)| mode.error(*p, *g))
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn final_errors(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Vec<Vec<f64>> {
    let last = pred.pred_len() - 1;
    (0..pred.num_samples())
        .map(|k| {
            (0..pred.num_agents())
                .map(|n| mode.error(pred.get(k, n, last), gt.future_track(n)[last]))
                .collect()
        })
        .collect()
}

/// Index of the smallest value; lowest index wins ties.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

fn marginal(errors: &[Vec<f64>]) -> f64 {
    let n_agents = errors[0].len();
    (0..n_agents).map(|n| argmin(errors.iter().map(|row| row[n])).1).sum()
}

fn joint(errors: &[Vec<f64>]) -> (f64, usize) {
    let (k, v) = argmin(errors.iter().map(|row| row.iter().sum::<f64>()));
    (v, k)
}

pub fn ade_with(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Result<f64> {
    check_shapes(pred, gt)?;
    let norm = (pred.pred_len() * pred.num_agents()) as f64;
    Ok(marginal(&summed_errors(pred, gt, mode)) / norm)
}

pub fn fde_with(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Result<f64> {
    check_shapes(pred, gt)?;
    Ok(marginal(&final_errors(pred, gt, mode)) / pred.num_agents() as f64)
}

pub fn jade_with(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Result<(f64, usize)> {
    check_shapes(pred, gt)?;
    let norm = (pred.pred_len() * pred.num_agents()) as f64;
    let (v, k) = joint(&summed_errors(pred, gt, mode));
    Ok((v / norm, k))
}

pub fn jfde_with(pred: &PredictionSet, gt: &Sequence, mode: DistanceMode) -> Result<(f64, usize)> {
    check_shapes(pred, gt)?;
    let (v, k) = joint(&final_errors(pred, gt, mode));
    Ok((v / pred.num_agents() as f64, k))
}

/// Best-of-K average displacement, minimum taken per agent.
pub fn ade(pred: &PredictionSet, gt: &Sequence) -> Result<f64> {
    ade_with(pred, gt, DistanceMode::Euclidean)
}

/// Best-of-K final displacement, minimum taken per agent.
pub fn fde(pred: &PredictionSet, gt: &Sequence) -> Result<f64> {
    fde_with(pred, gt, DistanceMode::Euclidean)
}

/// Joint ADE and the index of the sample achieving it.
pub fn jade(pred: &PredictionSet, gt: &Sequence) -> Result<(f64, usize)> {
    jade_with(pred, gt, DistanceMode::Euclidean)
}

/// Joint FDE and the index of the sample achieving it.
pub fn jfde(pred: &PredictionSet, gt: &Sequence) -> Result<(f64, usize)> {
    jfde_with(pred, gt, DistanceMode::Euclidean)
}

fn sample_collision_fraction(pred: &PredictionSet, k: usize, radius: f64) -> Result<f64> {
    let flags = collision_flags(pred.sample(k), pred.pred_len(), radius)?;
    Ok(flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64)
}

/// Collision fraction of the minimum-JADE sample.
pub fn cr_jade_with(pred: &PredictionSet, gt: &Sequence, radius: f64, mode: DistanceMode) -> Result<f64> {
    let (_, k) = jade_with(pred, gt, mode)?;
    sample_collision_fraction(pred, k, radius)
}

pub fn cr_jade(pred: &PredictionSet, gt: &Sequence, radius: f64) -> Result<f64> {
    cr_jade_with(pred, gt, radius, DistanceMode::Euclidean)
}

/// Fraction of (agent, sample) pairs in which the agent collides with
/// someone, over all K samples.
pub fn cr_mean(pred: &PredictionSet, radius: f64) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..pred.num_samples() {
        total += sample_collision_fraction(pred, k, radius)?;
    }
    Ok(total / pred.num_samples() as f64)
}

/// Per-agent collision indicators averaged over samples, one entry per
/// agent. Used for category-restricted collision rates.
pub fn per_agent_collision_rate(pred: &PredictionSet, radius: f64) -> Result<Vec<f64>> {
    let mut counts = vec![0.0; pred.num_agents()];
    for k in 0..pred.num_samples() {
        for (c, f) in counts
            .iter_mut()
            .zip(collision_flags(pred.sample(k), pred.pred_len(), radius)?)
        {
            if f {
                *c += 1.0;
            }
        }
    }
    let k = pred.num_samples() as f64;
    Ok(counts.into_iter().map(|c| c / k).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Unweighted mean over sequences per scene; overall is the mean of
    /// the scene values.
    #[default]
    PerSequence,
    /// Sequences weighted by agent count, per scene and overall.
    PerAgent,
}

impl FromStr for Weighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_sequence" => Ok(Weighting::PerSequence),
            "per_agent" => Ok(Weighting::PerAgent),
            other => Err(Error::Config(format!("unknown weighting {other:?}"))),
        }
    }
}

/// Ground-truth futures treated as a single sample: per-scene collision
/// fraction.
pub fn gt_collision_rate(seqs: &[Sequence], radius: f64, weighting: Weighting) -> Result<BTreeMap<String, f64>> {
    let mut acc: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for seq in seqs {
        let fraction = sample_collision_fraction(&seq.future_as_prediction(), 0, radius)?;
        let w = match weighting {
            Weighting::PerSequence => 1.0,
            Weighting::PerAgent => seq.num_agents() as f64,
        };
        let e = acc.entry(seq.scene_id.clone()).or_insert((0.0, 0.0));
        e.0 += w * fraction;
        e.1 += w;
    }
    Ok(acc.into_iter().map(|(scene, (s, w))| (scene, s / w)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeConfig {
    /// Lower bound on the kernel bandwidth, in scene units.
    pub bandwidth_floor: f64,
}

impl Default for KdeConfig {
    fn default() -> Self {
        KdeConfig { bandwidth_floor: 1e-3 }
    }
}

/// Isotropic Scott's-rule bandwidth for a 2D point set, floored.
pub fn scott_bandwidth(points: &[Position], floor: f64) -> f64 {
    let k = points.len() as f64;
    let mean = points.iter().fold(Position::default(), |acc, p| acc + *p) * (1.0 / k);
    let var = points.iter().map(|p| p.dist_sq(mean)).sum::<f64>() / (2.0 * (k - 1.0));
    (var.sqrt() * k.powf(-1.0 / 6.0)).max(floor)
}

/// −log of an isotropic 2D Gaussian KDE at `query`.
pub fn kde_neg_log_density(points: &[Position], query: Position, bandwidth: f64) -> f64 {
    let h2 = bandwidth * bandwidth;
    let exps: Vec<f64> = points.iter().map(|p| -p.dist_sq(query) / (2.0 * h2)).collect();
    let max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
    -lse + (points.len() as f64).ln() + (2.0 * std::f64::consts::PI * h2).ln()
}

/// Mean negative log-likelihood of the ground truth under a per-(t, n) KDE
/// of the K predicted positions.
///
/// The per-sample average over K in the usual formula repeats the same
/// per-(t, n) term K times, so it reduces to a mean over (t, n).
pub fn kde_nll(pred: &PredictionSet, gt: &Sequence, cfg: &KdeConfig) -> Result<f64> {
    check_shapes(pred, gt)?;
    if pred.num_samples() < 2 {
        return Err(Error::Config("KDE-NLL needs at least 2 samples".into()));
    }
    if !(cfg.bandwidth_floor > 0.0) {
        return Err(Error::Config("bandwidth floor must be > 0".into()));
    }
    let mut total = 0.0;
    let mut points = Vec::with_capacity(pred.num_samples());
    for n in 0..pred.num_agents() {
        for (t, truth) in gt.future_track(n).iter().enumerate() {
            points.clear();
            points.extend((0..pred.num_samples()).map(|k| pred.get(k, n, t)));
            let h = scott_bandwidth(&points, cfg.bandwidth_floor);
            total += kde_neg_log_density(&points, *truth, h);
        }
    }
    Ok(total / (pred.num_agents() * pred.pred_len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Ade,
    Fde,
    Jade,
    Jfde,
    CrMean,
    CrJade,
    Nll,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Ade,
        Metric::Fde,
        Metric::Jade,
        Metric::Jfde,
        Metric::CrMean,
        Metric::CrJade,
        Metric::Nll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ade => "ade",
            Metric::Fde => "fde",
            Metric::Jade => "jade",
            Metric::Jfde => "jfde",
            Metric::CrMean => "cr_mean",
            Metric::CrJade => "cr_jade",
            Metric::Nll => "nll",
        }
    }

    pub fn parse_list(list: &str) -> Result<Vec<Metric>> {
        let mut out: Vec<Metric> = Vec::new();
        for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let m: Metric = tok.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no metrics requested".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub metrics: Vec<Metric>,
    pub radius: f64,
    pub distance: DistanceMode,
    pub weighting: Weighting,
    pub kde: KdeConfig,
    /// Fail when a sequence has no predictions instead of listing it as
    /// missing.
    pub strict: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            metrics: vec![
                Metric::Ade,
                Metric::Fde,
                Metric::Jade,
                Metric::Jfde,
                Metric::CrMean,
                Metric::CrJade,
            ],
            radius: DEFAULT_RADIUS,
            distance: DistanceMode::Euclidean,
            weighting: Weighting::PerSequence,
            kde: KdeConfig::default(),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub sequence_id: String,
    pub scene_id: String,
    pub num_agents: usize,
    pub num_samples: usize,
    pub per_metric: BTreeMap<String, f64>,
    /// Minimizing sample for the joint metrics.
    pub argmin_sample: BTreeMap<String, usize>,
    /// min over k of each agent's mean displacement.
    pub per_agent_ade: Vec<f64>,
}

pub fn evaluate_sequence(pred: &PredictionSet, seq: &Sequence, cfg: &EvalConfig) -> Result<MetricReport> {
    check_shapes(pred, seq).map_err(|e| match e {
        Error::Shape { expected, actual, .. } => Error::Shape {
            context: format!("sequence {}", seq.sequence_id),
            expected,
            actual,
        },
        e => e,
    })?;
    let mode = cfg.distance;
    let summed = summed_errors(pred, seq, mode);
    let finals = final_errors(pred, seq, mode);
    let n = pred.num_agents() as f64;
    let tn = n * pred.pred_len() as f64;

    let mut per_metric = BTreeMap::new();
    let mut argmin_sample = BTreeMap::new();
    let (jade_sum, jade_k) = joint(&summed);
    for metric in &cfg.metrics {
        let value = match metric {
            Metric::Ade => marginal(&summed) / tn,
            Metric::Fde => marginal(&finals) / n,
            Metric::Jade => {
                argmin_sample.insert(metric.name().to_string(), jade_k);
                jade_sum / tn
            }
            Metric::Jfde => {
                let (v, k) = joint(&finals);
                argmin_sample.insert(metric.name().to_string(), k);
                v / n
            }
            Metric::CrMean => cr_mean(pred, cfg.radius)?,
            Metric::CrJade => {
                argmin_sample.insert(metric.name().to_string(), jade_k);
                sample_collision_fraction(pred, jade_k, cfg.radius)?
            }
            Metric::Nll => kde_nll(pred, seq, &cfg.kde)?,
        };
        per_metric.insert(metric.name().to_string(), value);
    }
    let t = pred.pred_len() as f64;
    let per_agent_ade = (0..pred.num_agents())
        .map(|a| argmin(summed.iter().map(|row| row[a])).1 / t)
        .collect();
    Ok(MetricReport {
        sequence_id: seq.sequence_id.clone(),
        scene_id: seq.scene_id.clone(),
        num_agents: pred.num_agents(),
        num_samples: pred.num_samples(),
        per_metric,
        argmin_sample,
        per_agent_ade,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSummary {
    pub num_sequences: usize,
    pub num_agents: usize,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub weighting: Weighting,
    pub metrics: Vec<Metric>,
    pub per_scene: BTreeMap<String, SceneSummary>,
    pub overall: BTreeMap<String, f64>,
    /// Sequences without predictions (non-strict mode only).
    pub missing: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sequences: Vec<MetricReport>,
}

fn weighted_means(reports: &[&MetricReport], metrics: &[Metric], weighting: Weighting) -> BTreeMap<String, f64> {
    metrics
        .iter()
        .map(|m| {
            let (mut s, mut w) = (0.0, 0.0);
            for r in reports {
                let wi = match weighting {
                    Weighting::PerSequence => 1.0,
                    Weighting::PerAgent => r.num_agents as f64,
                };
                s += wi * r.per_metric[m.name()];
                w += wi;
            }
            (m.name().to_string(), s / w)
        })
        .collect()
}

/// Scores every sequence that has predictions and aggregates per scene and
/// overall. Results do not depend on thread count.
pub fn evaluate(
    preds: &BTreeMap<String, PredictionSet>,
    seqs: &[Sequence],
    cfg: &EvalConfig,
) -> Result<AggregateReport> {
    if cfg.metrics.is_empty() {
        return Err(Error::Config("no metrics requested".into()));
    }
    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for seq in seqs {
        match preds.get(&seq.sequence_id) {
            Some(p) => pairs.push((p, seq)),
            None if cfg.strict => return Err(Error::MissingPrediction(seq.sequence_id.clone())),
            None => missing.push(seq.sequence_id.clone()),
        }
    }
    if pairs.is_empty() {
        return Err(Error::Empty("no sequence has predictions".into()));
    }
    let reports: Vec<MetricReport> = pairs
        .par_iter()
        .map(|(p, s)| evaluate_sequence(p, s, cfg))
        .collect::<Result<_>>()?;

    let mut by_scene: BTreeMap<&str, Vec<&MetricReport>> = BTreeMap::new();
    for r in &reports {
        by_scene.entry(r.scene_id.as_str()).or_default().push(r);
    }
    let per_scene: BTreeMap<String, SceneSummary> = by_scene
        .iter()
        .map(|(scene, rs)| {
            (
                scene.to_string(),
                SceneSummary {
                    num_sequences: rs.len(),
                    num_agents: rs.iter().map(|r| r.num_agents).sum(),
                    metrics: weighted_means(rs, &cfg.metrics, cfg.weighting),
                },
            )
        })
        .collect();
    let overall = match cfg.weighting {
        Weighting::PerSequence => cfg
            .metrics
            .iter()
            .map(|m| {
                let sum: f64 = per_scene.values().map(|s| s.metrics[m.name()]).sum();
                (m.name().to_string(), sum / per_scene.len() as f64)
            })
            .collect(),
        Weighting::PerAgent => weighted_means(&reports.iter().collect::<Vec<_>>(), &cfg.metrics, Weighting::PerAgent),
    };
    Ok(AggregateReport {
        weighting: cfg.weighting,
        metrics: cfg.metrics.clone(),
        per_scene,
        overall,
        missing,
        sequences: reports,
    })
}

impl AggregateReport {
    /// Nested per-scene JSON. Per-sequence reports are included only when
    /// asked for.
    pub fn to_json(&self, include_sequences: bool) -> String {
        let mut view = self.clone();
        if !include_sequences {
            view.sequences.clear();
        }
        serde_json::to_string_pretty(&view).expect("report serializes")
    }

    /// `scene,metric,value` rows; the overall row uses scene `overall`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scene,metric,value\n");
        let rows = self
            .per_scene
            .iter()
            .map(|(s, sum)| (s.as_str(), &sum.metrics))
            .chain(std::iter::once(("overall", &self.overall)));
        for (scene, metrics) in rows {
            for m in &self.metrics {
                out.push_str(&format!("{scene},{},{}\n", m.name(), metrics[m.name()]));
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<12}", "scene");
        for m in &self.metrics {
            out.push_str(&format!("{:>10}", m.name()));
        }
        out.push('\n');
        let rows = self
            .per_scene
            .iter()
            .map(|(s, sum)| (s.as_str(), &sum.metrics))
            .chain(std::iter::once(("overall", &self.overall)));
        for (scene, metrics) in rows {
            out.push_str(&format!("{scene:<12}"));
            for m in &self.metrics {
                out.push_str(&format!("{:>10.4}", metrics[m.name()]));
            }
            out.push('\n');
        }
        if !self.missing.is_empty() {
            out.push_str(&format!("missing predictions: {} sequences\n", self.missing.len()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajdata::Units;

    fn seq_from(future: Vec<Vec<Position>>) -> Sequence {
        let n = future.len();
        let t = future[0].len();
        Sequence::new(
            "s:0",
            "s",
            2.5,
            Units::Meters,
            (0..n as i64).collect(),
            1,
            vec![Position::default(); n],
            t,
            future.into_iter().flatten().collect(),
        )
        .unwrap()
    }

    fn p(x: f64, y: f64) -> Position {
        Position::new(x, y)
    }

    /// K=2, N=2, T=1; agent 0 errors (0, 1), agent 1 errors (1, 0).
    fn mix_and_match() -> (PredictionSet, Sequence) {
        let gt = seq_from(vec![vec![p(0.0, 0.0)], vec![p(10.0, 0.0)]]);
        let pred = PredictionSet::new(
            "s:0",
            2,
            2,
            1,
            vec![p(0.0, 0.0), p(11.0, 0.0), p(1.0, 0.0), p(10.0, 0.0)],
        )
        .unwrap();
        (pred, gt)
    }

    #[test]
    fn mix_and_match_gap() {
        let (pred, gt) = mix_and_match();
        assert_eq!(ade(&pred, &gt).unwrap(), 0.0);
        assert_eq!(jade(&pred, &gt).unwrap(), (0.5, 0));
        assert_eq!(fde(&pred, &gt).unwrap(), 0.0);
        assert_eq!(jfde(&pred, &gt).unwrap(), (0.5, 0));
    }

    #[test]
    fn exact_match_sample_gives_zero() {
        let gt = seq_from(vec![vec![p(1.0, 2.0), p(2.0, 3.0)]]);
        let pred =
            PredictionSet::new("s:0", 2, 1, 2, vec![p(5.0, 5.0), p(5.0, 5.0), p(1.0, 2.0), p(2.0, 3.0)]).unwrap();
        assert_eq!(ade(&pred, &gt).unwrap(), 0.0);
        assert_eq!(fde(&pred, &gt).unwrap(), 0.0);
        assert_eq!(jade(&pred, &gt).unwrap(), (0.0, 1));
    }

    #[test]
    fn fde_three_four_five() {
        let gt = seq_from(vec![vec![p(0.0, 0.0), p(0.0, 0.0)]]);
        let pred = PredictionSet::new("s:0", 1, 1, 2, vec![p(0.0, 0.0), p(3.0, 4.0)]).unwrap();
        assert_eq!(fde(&pred, &gt).unwrap(), 5.0);
        assert_eq!(fde_with(&pred, &gt, DistanceMode::Squared).unwrap(), 25.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let gt = seq_from(vec![vec![p(0.0, 0.0), p(0.0, 0.0)]]);
        let pred = PredictionSet::new("s:0", 1, 1, 3, vec![p(0.0, 0.0); 3]).unwrap();
        assert!(ade(&pred, &gt).is_err());
        assert!(matches!(
            evaluate_sequence(&pred, &gt, &EvalConfig::default()),
            Err(Error::Shape { context, .. }) if context.contains("s:0")
        ));
    }

    #[test]
    fn collision_rates() {
        // agents 0 and 1 swap places, agent 2 far away
        let gt = seq_from(vec![
            vec![p(0.0, 0.0), p(1.0, 0.0)],
            vec![p(1.0, 0.0), p(0.0, 0.0)],
            vec![p(9.0, 9.0), p(9.0, 8.0)],
        ]);
        let pred = gt.future_as_prediction();
        assert!((cr_jade(&pred, &gt, 0.1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((cr_mean(&pred, 0.1).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let single = seq_from(vec![vec![p(0.0, 0.0), p(1.0, 0.0)]]);
        assert_eq!(cr_jade(&single.future_as_prediction(), &single, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn gt_collision_rate_per_scene() {
        let crossing = seq_from(vec![vec![p(0.0, 0.0), p(1.0, 0.0)], vec![p(1.0, 0.0), p(0.0, 0.0)]]);
        let apart = seq_from(vec![vec![p(0.0, 0.0), p(1.0, 0.0)], vec![p(0.0, 5.0), p(1.0, 5.0)]]);
        let rates = gt_collision_rate(&[crossing, apart], 0.1, Weighting::PerSequence).unwrap();
        assert_eq!(rates["s"], 0.5);
    }

    #[test]
    fn kde_nll_of_identical_samples_hits_floor_kernel() {
        let gt = seq_from(vec![vec![p(1.0, 1.0)]]);
        let pred = PredictionSet::new("s:0", 4, 1, 1, vec![p(1.0, 1.0); 4]).unwrap();
        let h: f64 = 1e-3;
        let expected = -(1.0 / (2.0 * std::f64::consts::PI * h * h)).ln();
        let got = kde_nll(&pred, &gt, &KdeConfig::default()).unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn kde_nll_needs_two_samples() {
        let gt = seq_from(vec![vec![p(1.0, 1.0)]]);
        let pred = PredictionSet::new("s:0", 1, 1, 1, vec![p(1.0, 1.0)]).unwrap();
        assert!(kde_nll(&pred, &gt, &KdeConfig::default()).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!(Metric::parse_list("ade,bogus").is_err());
        assert_eq!(
            Metric::parse_list("ade, jade,ade").unwrap(),
            vec![Metric::Ade, Metric::Jade]
        );
    }
}
