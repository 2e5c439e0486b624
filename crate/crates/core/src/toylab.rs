//! Synthetic scenes and a minimal trainable predictor that expose the
//! difference between marginal and joint objectives.
//!
//! Every sequence of a scenario shares the same (noise-free) history and
//! resolves into one of two joint futures. The [`OffsetPredictor`] learns K
//! fixed displacement fields added to a constant-velocity extrapolation, so
//! its optimum is decided purely by the loss geometry: a marginal objective
//! is equally happy pairing agent futures across modes, a joint objective is
//! not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_RADIUS;
use crate::losses::{combined_loss, LossConfig};
use crate::metrics::{ade, cr_mean, fde, jade, jfde};
use crate::trajdata::{Position, PredictionSet, Sequence, Units};

pub const OBS_LEN: usize = 8;
pub const PRED_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Two side-by-side walkers who both veer left or both veer right.
    TwoModeGroup,
    /// Two walkers on perpendicular paths; one keeps pace while the other
    /// yields.
    CrossingPair,
    /// A row of walkers that veer left or right together.
    Crowd,
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_mode" | "two_mode_group" => Ok(ScenarioKind::TwoModeGroup),
            "crossing_pair" => Ok(ScenarioKind::CrossingPair),
            "crowd" => Ok(ScenarioKind::Crowd),
            other => Err(Error::Config(format!("unknown scenario {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyScenario {
    pub kind: ScenarioKind,
    pub num_train_sequences: usize,
    pub num_eval_sequences: usize,
    /// Distance between the two modes at the final step, per agent.
    pub mode_gap: f64,
    pub noise_std: f64,
    /// Agents in a crowd scenario; the other kinds always have two.
    pub crowd_size: usize,
    pub seed: u64,
}

impl ToyScenario {
    pub fn two_mode(seed: u64) -> Self {
        ToyScenario {
            kind: ScenarioKind::TwoModeGroup,
            num_train_sequences: 64,
            num_eval_sequences: 64,
            mode_gap: 2.0,
            noise_std: 0.0,
            crowd_size: 4,
            seed,
        }
    }

    pub fn crossing_pair(seed: u64) -> Self {
        ToyScenario {
            kind: ScenarioKind::CrossingPair,
            mode_gap: 3.6,
            ..ToyScenario::two_mode(seed)
        }
    }

    pub fn crowd(seed: u64) -> Self {
        ToyScenario {
            kind: ScenarioKind::Crowd,
            ..ToyScenario::two_mode(seed)
        }
    }

    pub fn num_agents(&self) -> usize {
        match self.kind {
            ScenarioKind::Crowd => self.crowd_size,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mode_gap > 0.0) {
            return Err(Error::Config(format!("mode_gap must be > 0, got {}", self.mode_gap)));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Config("noise_std must be >= 0".into()));
        }
        if self.num_train_sequences == 0 || self.num_eval_sequences == 0 {
            return Err(Error::Config("train and eval sets must be non-empty".into()));
        }
        if self.kind == ScenarioKind::Crowd && self.crowd_size < 2 {
            return Err(Error::Config("crowd needs at least 2 agents".into()));
        }
        if self.kind == ScenarioKind::CrossingPair && self.mode_gap >= 12.0 * WALK_SPEED {
            return Err(Error::Config(
                "crossing_pair mode_gap must be below the walked distance".into(),
            ));
        }
        Ok(())
    }

    /// Noise-free trajectories (observed then future) of every agent under
    /// `mode` ∈ {0, 1}.
    pub fn mode_tracks(&self, mode: usize) -> Vec<Vec<Position>> {
        let sign = if mode == 0 { 1.0 } else { -1.0 };
        let horizon = PRED_LEN as f64;
        let steps = || (0..OBS_LEN + PRED_LEN).map(|i| i as f64 - (OBS_LEN - 1) as f64);
        match self.kind {
            ScenarioKind::TwoModeGroup | ScenarioKind::Crowd => {
                let n = self.num_agents();
                (0..n)
                    .map(|a| {
                        let lane = a as f64 - (n - 1) as f64 / 2.0;
                        steps()
                            .map(|t| {
                                let veer = if t > 0.0 {
                                    sign * self.mode_gap / 2.0 * t / horizon
                                } else {
                                    0.0
                                };
                                Position::new(WALK_SPEED * t, lane + veer)
                            })
                            .collect()
                    })
                    .collect()
            }
            ScenarioKind::CrossingPair => {
                // both would reach the origin at future step 6 at full pace
                let slow = WALK_SPEED - self.mode_gap / horizon;
                let yielding = if mode == 0 { 1 } else { 0 };
                (0..2)
                    .map(|a| {
                        let speed_after = if a == yielding { slow } else { WALK_SPEED };
                        steps()
                            .map(|t| {
                                let s = if t > 0.0 { speed_after * t } else { WALK_SPEED * t } - 6.0 * WALK_SPEED;
                                if a == 0 {
                                    Position::new(s, 0.0)
                                } else {
                                    Position::new(0.0, s)
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

const WALK_SPEED: f64 = 0.4;

/// A generated sequence and the mode it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySample {
    pub sequence: Sequence,
    pub mode: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyData {
    pub train: Vec<ToySample>,
    pub eval: Vec<ToySample>,
}

fn make_sequence(scn: &ToyScenario, id: String, mode: usize, rng: &mut ChaCha8Rng) -> Result<Sequence> {
    let noise = Normal::new(0.0, scn.noise_std.max(0.0)).map_err(|e| Error::Config(e.to_string()))?;
    let tracks = scn.mode_tracks(mode);
    let n = tracks.len();
    let mut obs = Vec::with_capacity(n * OBS_LEN);
    let mut fut = Vec::with_capacity(n * PRED_LEN);
    for track in &tracks {
        for (i, p) in track.iter().enumerate() {
            let jitter = if scn.noise_std > 0.0 {
                Position::new(noise.sample(rng), noise.sample(rng))
            } else {
                Position::default()
            };
            if i < OBS_LEN {
                obs.push(*p + jitter);
            } else {
                fut.push(*p + jitter);
            }
        }
    }
    Sequence::new(
        id,
        "toy",
        2.5,
        Units::Meters,
        (0..n as i64).collect(),
        OBS_LEN,
        obs,
        PRED_LEN,
        fut,
    )
}

/// Generates train and eval sets; each sequence picks a mode with
/// probability 1/2. Bit-identical for a given scenario.
pub fn generate(scn: &ToyScenario) -> Result<ToyData> {
    scn.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut split = |prefix: &str, count: usize| -> Result<Vec<ToySample>> {
        (0..count)
            .map(|i| {
                let mode = usize::from(rng.gen_bool(0.5));
                let sequence = make_sequence(scn, format!("{prefix}:{i}"), mode, &mut rng)?;
                Ok(ToySample { sequence, mode })
            })
            .collect()
    };
    let train = split("train", scn.num_train_sequences)?;
    let eval = split("eval", scn.num_eval_sequences)?;
    Ok(ToyData { train, eval })
}

/// K learnable displacement fields added to a constant-velocity
/// extrapolation of each sequence's history.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetPredictor {
    num_samples: usize,
    num_agents: usize,
    pred_len: usize,
    /// K×N×T×2, same layout as loss gradients.
    pub params: Vec<f64>,
}

impl OffsetPredictor {
    pub fn new(num_samples: usize, num_agents: usize, pred_len: usize, init_std: f64, seed: u64) -> Result<Self> {
        if num_samples == 0 || num_agents == 0 || pred_len == 0 {
            return Err(Error::Config("predictor dimensions must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = num_samples * num_agents * pred_len * 2;
        let params = if init_std > 0.0 {
            let normal = Normal::new(0.0, init_std).map_err(|e| Error::Config(e.to_string()))?;
            (0..len).map(|_| normal.sample(&mut rng)).collect()
        } else {
            vec![0.0; len]
        };
        Ok(OffsetPredictor {
            num_samples,
            num_agents,
            pred_len,
            params,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn predict(&self, seq: &Sequence) -> Result<PredictionSet> {
        if seq.num_agents() != self.num_agents || seq.pred_len() != self.pred_len {
            return Err(Error::shape(
                format!("predictor input {}", seq.sequence_id),
                format!("N={}, T={}", self.num_agents, self.pred_len),
                format!("N={}, T={}", seq.num_agents(), seq.pred_len()),
            ));
        }
        PredictionSet::from_fn(
            &seq.sequence_id,
            self.num_samples,
            self.num_agents,
            self.pred_len,
            |k, n, t| {
                let last = *seq.obs_track(n).last().expect("non-empty history");
                let base = last + seq.last_obs_velocity(n) * (t + 1) as f64;
                let i = ((k * self.num_agents + n) * self.pred_len + t) * 2;
                base + Position::new(self.params[i], self.params[i + 1])
            },
        )
        .map(|p| p.with_agent_ids(seq.agent_ids().to_vec()).expect("agent count checked"))
    }
}

/// How the predictor's offsets are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// i.i.d. Gaussian offsets around the constant-velocity extrapolation.
    Gaussian,
    /// Each sample starts at the residual of a randomly drawn training
    /// sequence, plus Gaussian jitter.
    FromData,
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Init::Gaussian),
            "data" | "from_data" => Ok(Init::FromData),
            other => Err(Error::Config(format!("unknown init {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub num_samples: usize,
    pub steps: usize,
    pub lr: f64,
    pub init: Init,
    /// Std of the initial offsets, meters.
    pub init_std: f64,
    /// Seed for the predictor initialization.
    pub seed: u64,
    /// Record eval metrics every this many steps (and at the end).
    pub log_every: usize,
    pub radius: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            num_samples: 2,
            steps: 2000,
            lr: 0.05,
            init: Init::Gaussian,
            init_std: 0.5,
            seed: 0,
            log_every: 100,
            radius: DEFAULT_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub ade: f64,
    pub fde: f64,
    pub jade: f64,
    pub jfde: f64,
    pub cr_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    /// Training loss at this step, before the update.
    pub loss: f64,
    pub eval: EvalMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub predictor: OffsetPredictor,
    pub trace: Vec<TracePoint>,
}

impl TrainResult {
    pub fn final_point(&self) -> &TracePoint {
        self.trace.last().expect("trace always has the final step")
    }

    /// CSV `step,loss,ade,fde,jade,jfde,cr_mean`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,loss,ade,fde,jade,jfde,cr_mean\n");
        for p in &self.trace {
            let e = &p.eval;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.step, p.loss, e.ade, e.fde, e.jade, e.jfde, e.cr_mean
            ));
        }
        out
    }
}

/// Mean eval metrics of a predictor over a set of sequences.
pub fn evaluate_predictor(predictor: &OffsetPredictor, samples: &[ToySample], radius: f64) -> Result<EvalMetrics> {
    let mut m = EvalMetrics {
        ade: 0.0,
        fde: 0.0,
        jade: 0.0,
        jfde: 0.0,
        cr_mean: 0.0,
    };
    for s in samples {
        let pred = predictor.predict(&s.sequence)?;
        m.ade += ade(&pred, &s.sequence)?;
        m.fde += fde(&pred, &s.sequence)?;
        m.jade += jade(&pred, &s.sequence)?.0;
        m.jfde += jfde(&pred, &s.sequence)?.0;
        m.cr_mean += cr_mean(&pred, radius)?;
    }
    let c = samples.len() as f64;
    Ok(EvalMetrics {
        ade: m.ade / c,
        fde: m.fde / c,
        jade: m.jade / c,
        jfde: m.jfde / c,
        cr_mean: m.cr_mean / c,
    })
}

fn batch_loss(predictor: &OffsetPredictor, samples: &[ToySample], cfg: &LossConfig) -> Result<(f64, Vec<f64>)> {
    let mut loss = 0.0;
    let mut grad = vec![0.0; predictor.params.len()];
    for s in samples {
        let out = combined_loss(&predictor.predict(&s.sequence)?, &s.sequence, cfg)?;
        loss += out.value;
        for (g, o) in grad.iter_mut().zip(&out.grad) {
            *g += o;
        }
    }
    let c = samples.len() as f64;
    grad.iter_mut().for_each(|g| *g /= c);
    Ok((loss / c, grad))
}

/// Full-batch fixed-step gradient descent on the mean training loss.
pub fn train_predictor(scn: &ToyScenario, loss_cfg: &LossConfig, train: &TrainConfig) -> Result<TrainResult> {
    let data = generate(scn)?;
    train_on(&data, scn.num_agents(), loss_cfg, train)
}

pub fn train_on(data: &ToyData, num_agents: usize, loss_cfg: &LossConfig, train: &TrainConfig) -> Result<TrainResult> {
    if !(train.lr > 0.0) {
        return Err(Error::Config(format!("learning rate must be > 0, got {}", train.lr)));
    }
    loss_cfg.validate(PRED_LEN)?;
    let mut predictor = OffsetPredictor::new(train.num_samples, num_agents, PRED_LEN, train.init_std, train.seed)?;
    if train.init == Init::FromData {
        seed_from_data(&mut predictor, &data.train, train.seed)?;
    }
    let log_every = train.log_every.max(1);
    let mut trace = Vec::new();
    for step in 0..=train.steps {
        let (loss, grad) = batch_loss(&predictor, &data.train, loss_cfg)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { step, loss });
        }
        if step % log_every == 0 || step == train.steps {
            trace.push(TracePoint {
                step,
                loss,
                eval: evaluate_predictor(&predictor, &data.eval, train.radius)?,
            });
        }
        if step == train.steps {
            break;
        }
        for (p, g) in predictor.params.iter_mut().zip(&grad) {
            *p -= train.lr * g;
        }
    }
    Ok(TrainResult { predictor, trace })
}

/// Adds to each sample's offsets the residual (future minus
/// constant-velocity extrapolation) of a training sequence drawn uniformly.
fn seed_from_data(predictor: &mut OffsetPredictor, train: &[ToySample], seed: u64) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Empty("training set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_da7a);
    let (n_agents, t_len) = (predictor.num_agents, predictor.pred_len);
    for k in 0..predictor.num_samples {
        let seq = &train[rng.gen_range(0..train.len())].sequence;
        let base = predictor.predict(seq)?;
        let truth = seq.future_as_prediction();
        for n in 0..n_agents {
            for t in 0..t_len {
                let i = ((k * n_agents + n) * t_len + t) * 2;
                let jitter = Position::new(predictor.params[i], predictor.params[i + 1]);
                let residual = truth.get(0, n, t) - (base.get(k, n, t) - jitter);
                predictor.params[i] = residual.x + jitter.x;
                predictor.params[i + 1] = residual.y + jitter.y;
            }
        }
    }
    Ok(())
}

/// A predictor whose sample `k` reproduces, for agent `n`, the noise-free
/// future of mode `assignment[k][n]`. Used to score the analytic optima.
pub fn oracle_predictor(scn: &ToyScenario, assignment: &[Vec<usize>]) -> Result<OffsetPredictor> {
    let n_agents = scn.num_agents();
    let mut predictor = OffsetPredictor::new(assignment.len(), n_agents, PRED_LEN, 0.0, 0)?;
    let modes = [scn.mode_tracks(0), scn.mode_tracks(1)];
    for (k, row) in assignment.iter().enumerate() {
        if row.len() != n_agents {
            return Err(Error::shape("oracle assignment", n_agents, row.len()));
        }
        for (n, &mode) in row.iter().enumerate() {
            let track = &modes[mode.min(1)][n];
            let last = track[OBS_LEN - 1];
            let vel = last - track[OBS_LEN - 2];
            for t in 0..PRED_LEN {
                let off = track[OBS_LEN + t] - (last + vel * (t + 1) as f64);
                let i = ((k * n_agents + n) * PRED_LEN + t) * 2;
                predictor.params[i] = off.x;
                predictor.params[i + 1] = off.y;
            }
        }
    }
    Ok(predictor)
}

/// The marginal objective's mix-and-match optimum for K=2: each sample pairs
/// agent 0's mode with the opposite mode for every other agent.
pub fn mix_and_match_assignment(num_agents: usize) -> Vec<Vec<usize>> {
    (0..2)
        .map(|k| (0..num_agents).map(|n| if n == 0 { k } else { 1 - k }).collect())
        .collect()
}

/// The joint optimum for K=2: one sample per joint mode.
pub fn consistent_assignment(num_agents: usize) -> Vec<Vec<usize>> {
    (0..2).map(|k| vec![k; num_agents]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub name: String,
    pub final_loss: f64,
    pub eval: EvalMetrics,
}

/// Trains one predictor per named loss configuration (in parallel) and
/// reports final eval metrics in grid order.
pub fn run_ablation(scn: &ToyScenario, grid: &[(String, LossConfig)], train: &TrainConfig) -> Result<Vec<AblationRow>> {
    let data = generate(scn)?;
    grid.par_iter()
        .map(|(name, cfg)| {
            let result = train_on(&data, scn.num_agents(), cfg, train)?;
            let last = result.final_point();
            Ok(AblationRow {
                name: name.clone(),
                final_loss: last.loss,
                eval: last.eval,
            })
        })
        .collect()
}

/// CSV `config,final_loss,ade,fde,jade,jfde,cr_mean`.
pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("config,final_loss,ade,fde,jade,jfde,cr_mean\n");
    for r in rows {
        let e = &r.eval;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.name, r.final_loss, e.ade, e.fde, e.jade, e.jfde, e.cr_mean
        ));
    }
    out
}

/// The standard marginal / joint / both grid.
pub fn standard_grid() -> Vec<(String, LossConfig)> {
    vec![
        ("marginal".to_string(), LossConfig::marginal_only()),
        ("joint".to_string(), LossConfig::joint_only()),
        ("marginal+joint".to_string(), LossConfig::marginal_and_joint(1.0)),
    ]
}
