//! Data model: positions, evaluation sequences, prediction sets, and the
//! sliding-window extraction of sequences from raw per-frame records.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2D position in scene units (meters for ETH/UCY, pixels for SDD).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Position) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Position) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Position) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Position) -> f64 {
        (self - other).norm_sq()
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, rhs: Position) -> Position {
        Position::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, rhs: Position) -> Position {
        Position::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Position {
    type Output = Position;
    fn mul(self, rhs: f64) -> Position {
        Position::new(self.x * rhs, self.y * rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Meters,
    Pixels,
}

/// One evaluation unit: N agents, each with `obs_len` observed and
/// `pred_len` ground-truth future positions. Agent-major flat storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub sequence_id: String,
    pub scene_id: String,
    pub frame_rate: f64,
    pub units: Units,
    agent_ids: Vec<i64>,
    obs_len: usize,
    pred_len: usize,
    obs: Vec<Position>,
    future: Vec<Position>,
}

impl Sequence {
    /// `obs` and `future` are agent-major: agent `n` occupies
    /// `obs[n * obs_len..(n + 1) * obs_len]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sequence_id: impl Into<String>,
        scene_id: impl Into<String>,
        frame_rate: f64,
        units: Units,
        agent_ids: Vec<i64>,
        obs_len: usize,
        obs: Vec<Position>,
        pred_len: usize,
        future: Vec<Position>,
    ) -> Result<Self> {
        let sequence_id = sequence_id.into();
        let n = agent_ids.len();
        if n == 0 {
            return Err(Error::Empty(format!("sequence {sequence_id} has no agents")));
        }
        if obs_len == 0 || pred_len == 0 {
            return Err(Error::Config("obs_len and pred_len must be >= 1".into()));
        }
        if obs.len() != n * obs_len {
            return Err(Error::shape(&sequence_id, n * obs_len, obs.len()));
        }
        if future.len() != n * pred_len {
            return Err(Error::shape(&sequence_id, n * pred_len, future.len()));
        }
        let mut sorted = agent_ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate agent id in sequence {sequence_id}")));
        }
        if let Some(p) = obs.iter().chain(&future).find(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("{p:?} in sequence {sequence_id}")));
        }
        Ok(Sequence {
            sequence_id,
            scene_id: scene_id.into(),
            frame_rate,
            units,
            agent_ids,
            obs_len,
            pred_len,
            obs,
            future,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agent_ids.len()
    }

    pub fn agent_ids(&self) -> &[i64] {
        &self.agent_ids
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    pub fn pred_len(&self) -> usize {
        self.pred_len
    }

    pub fn obs_track(&self, n: usize) -> &[Position] {
        &self.obs[n * self.obs_len..(n + 1) * self.obs_len]
    }

    pub fn future_track(&self, n: usize) -> &[Position] {
        &self.future[n * self.pred_len..(n + 1) * self.pred_len]
    }

    /// Observed followed by future positions.
    pub fn full_track(&self, n: usize) -> Vec<Position> {
        let mut track = self.obs_track(n).to_vec();
        track.extend_from_slice(self.future_track(n));
        track
    }

    /// The ground-truth future as agent-major flat storage.
    pub fn future_flat(&self) -> &[Position] {
        &self.future
    }

    pub fn obs_flat(&self) -> &[Position] {
        &self.obs
    }

    /// Finite-difference velocity of agent `n` over its observed history,
    /// in scene units per frame. Zero for a single observed frame.
    pub fn last_obs_velocity(&self, n: usize) -> Position {
        let obs = self.obs_track(n);
        match obs {
            [.., a, b] => *b - *a,
            _ => Position::default(),
        }
    }

    /// The ground-truth future viewed as a one-sample prediction set.
    pub fn future_as_prediction(&self) -> PredictionSet {
        PredictionSet {
            sequence_id: self.sequence_id.clone(),
            agent_ids: self.agent_ids.clone(),
            num_samples: 1,
            num_agents: self.num_agents(),
            pred_len: self.pred_len,
            samples: self.future.clone(),
        }
    }
}

/// K joint samples of the future for every agent of one sequence.
/// Storage is sample-major, then agent, then timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub sequence_id: String,
    agent_ids: Vec<i64>,
    num_samples: usize,
    num_agents: usize,
    pred_len: usize,
    samples: Vec<Position>,
}

impl PredictionSet {
    pub fn new(
        sequence_id: impl Into<String>,
        num_samples: usize,
        num_agents: usize,
        pred_len: usize,
        samples: Vec<Position>,
    ) -> Result<Self> {
        let sequence_id = sequence_id.into();
        if num_samples == 0 || num_agents == 0 || pred_len == 0 {
            return Err(Error::shape(
                &sequence_id,
                "K, N, T >= 1",
                format!("K={num_samples}, N={num_agents}, T={pred_len}"),
            ));
        }
        let expected = num_samples * num_agents * pred_len;
        if samples.len() != expected {
            return Err(Error::shape(&sequence_id, expected, samples.len()));
        }
        if let Some(p) = samples.iter().find(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("{p:?} in predictions for {sequence_id}")));
        }
        Ok(PredictionSet {
            sequence_id,
            agent_ids: (0..num_agents as i64).collect(),
            num_samples,
            num_agents,
            pred_len,
            samples,
        })
    }

    /// Builds a set from a generator called once per (k, n, t).
    pub fn from_fn(
        sequence_id: impl Into<String>,
        num_samples: usize,
        num_agents: usize,
        pred_len: usize,
        mut f: impl FnMut(usize, usize, usize) -> Position,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(num_samples * num_agents * pred_len);
        for k in 0..num_samples {
            for n in 0..num_agents {
                for t in 0..pred_len {
                    samples.push(f(k, n, t));
                }
            }
        }
        Self::new(sequence_id, num_samples, num_agents, pred_len, samples)
    }

    /// Replaces the default `0..N` agent ids.
    pub fn with_agent_ids(mut self, agent_ids: Vec<i64>) -> Result<Self> {
        if agent_ids.len() != self.num_agents {
            return Err(Error::shape(
                format!("agent ids of {}", self.sequence_id),
                self.num_agents,
                agent_ids.len(),
            ));
        }
        self.agent_ids = agent_ids;
        Ok(self)
    }

    pub fn agent_ids(&self) -> &[i64] {
        &self.agent_ids
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn pred_len(&self) -> usize {
        self.pred_len
    }

    /// All agents' tracks for sample `k`, agent-major.
    pub fn sample(&self, k: usize) -> &[Position] {
        let stride = self.num_agents * self.pred_len;
        &self.samples[k * stride..(k + 1) * stride]
    }

    pub fn track(&self, k: usize, n: usize) -> &[Position] {
        let start = (k * self.num_agents + n) * self.pred_len;
        &self.samples[start..start + self.pred_len]
    }

    pub fn get(&self, k: usize, n: usize, t: usize) -> Position {
        self.samples[(k * self.num_agents + n) * self.pred_len + t]
    }

    pub fn as_flat(&self) -> &[Position] {
        &self.samples
    }

    /// Reorders samples so that new sample `i` is old sample `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> PredictionSet {
        let mut samples = Vec::with_capacity(self.samples.len());
        for &k in order {
            samples.extend_from_slice(self.sample(k));
        }
        PredictionSet {
            samples,
            ..self.clone()
        }
    }

    pub fn check_matches(&self, seq: &Sequence) -> Result<()> {
        if self.num_agents != seq.num_agents() || self.pred_len != seq.pred_len() {
            return Err(Error::shape(
                format!("predictions for {}", seq.sequence_id),
                format!("N={}, T={}", seq.num_agents(), seq.pred_len()),
                format!("N={}, T={}", self.num_agents, self.pred_len),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub obs_len: usize,
    pub pred_len: usize,
    pub stride: usize,
    pub target_fps: f64,
    pub require_full_presence: bool,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            obs_len: 8,
            pred_len: 12,
            stride: 1,
            target_fps: 2.5,
            require_full_presence: true,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.obs_len == 0 || self.pred_len == 0 || self.stride == 0 {
            return Err(Error::Config("obs_len, pred_len and stride must be >= 1".into()));
        }
        if !(self.target_fps > 0.0) {
            return Err(Error::Config(format!(
                "target_fps must be > 0, got {}",
                self.target_fps
            )));
        }
        Ok(())
    }

    pub fn seq_len(&self) -> usize {
        self.obs_len + self.pred_len
    }
}

/// Identifies the recording a batch of raw records came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingInfo {
    /// Dataset-level scene name used for aggregation, e.g. `univ`.
    pub scene_id: String,
    /// Recording name used in sequence ids, e.g. `students001`.
    pub recording: String,
    pub units: Units,
}

impl RecordingInfo {
    pub fn new(scene_id: impl Into<String>, recording: impl Into<String>, units: Units) -> Self {
        RecordingInfo {
            scene_id: scene_id.into(),
            recording: recording.into(),
            units,
        }
    }
}

/// Cuts one recording into overlapping `obs_len + pred_len` windows over its
/// sorted distinct frames.
///
/// With `require_full_presence` an agent belongs to a window iff it has a
/// record at every frame of it. Otherwise any agent seen at the last observed
/// frame is kept and its missing frames are filled by linear interpolation
/// between known records (held constant beyond the first/last record).
/// Windows without agents are dropped.
pub fn window_sequences(
    raw: &[(i64, i64, Position)],
    cfg: &WindowConfig,
    info: &RecordingInfo,
) -> Result<Vec<Sequence>> {
    cfg.validate()?;
    let mut records = raw.to_vec();
    records.sort_by_key(|a| (a.0, a.1));
    if let Some(w) = records.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        return Err(Error::DuplicateRecord {
            frame: w[0].0,
            agent_id: w[0].1,
        });
    }
    if let Some(r) = records.iter().find(|r| !r.2.is_finite()) {
        return Err(Error::NonFinite(format!("agent {} at frame {}", r.1, r.0)));
    }

    // frame -> records of that frame, sorted by agent id
    let mut by_frame: BTreeMap<i64, Vec<(i64, Position)>> = BTreeMap::new();
    for (frame, agent, pos) in records {
        by_frame.entry(frame).or_default().push((agent, pos));
    }
    let frames: Vec<i64> = by_frame.keys().copied().collect();
    let seq_len = cfg.seq_len();
    if frames.len() < seq_len {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for start in (0..=frames.len() - seq_len).step_by(cfg.stride) {
        let window = &frames[start..start + seq_len];
        let mut tracks: BTreeMap<i64, Vec<Option<Position>>> = BTreeMap::new();
        for (i, frame) in window.iter().enumerate() {
            for &(agent, pos) in &by_frame[frame] {
                tracks.entry(agent).or_insert_with(|| vec![None; seq_len])[i] = Some(pos);
            }
        }

        let mut agent_ids = Vec::new();
        let mut obs = Vec::new();
        let mut future = Vec::new();
        for (agent, track) in tracks {
            let filled = if cfg.require_full_presence {
                if track.iter().any(Option::is_none) {
                    continue;
                }
                track.into_iter().flatten().collect::<Vec<_>>()
            } else {
                if track[cfg.obs_len - 1].is_none() {
                    continue;
                }
                fill_gaps(&track)
            };
            agent_ids.push(agent);
            obs.extend_from_slice(&filled[..cfg.obs_len]);
            future.extend_from_slice(&filled[cfg.obs_len..]);
        }
        if agent_ids.is_empty() {
            continue;
        }
        out.push(Sequence::new(
            format!("{}:{}", info.recording, window[0]),
            info.scene_id.clone(),
            cfg.target_fps,
            info.units,
            agent_ids,
            cfg.obs_len,
            obs,
            cfg.pred_len,
            future,
        )?);
    }
    Ok(out)
}

fn fill_gaps(track: &[Option<Position>]) -> Vec<Position> {
    let known: Vec<(usize, Position)> = track
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (i, p)))
        .collect();
    (0..track.len())
        .map(|i| {
            if let Some(p) = track[i] {
                return p;
            }
            let next = known.iter().find(|(j, _)| *j > i);
            let prev = known.iter().rev().find(|(j, _)| *j < i);
            match (prev, next) {
                (Some(&(i0, p0)), Some(&(i1, p1))) => {
                    let w = (i - i0) as f64 / (i1 - i0) as f64;
                    p0 + (p1 - p0) * w
                }
                (Some(&(_, p)), None) | (None, Some(&(_, p))) => p,
                (None, None) => unreachable!("track has at least one record"),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityStats {
    pub mean_agents_per_sequence: f64,
    pub total_agents: usize,
}

pub fn density_stats(seqs: &[Sequence]) -> Result<DensityStats> {
    if seqs.is_empty() {
        return Err(Error::Empty("density_stats needs at least one sequence".into()));
    }
    let total: usize = seqs.iter().map(Sequence::num_agents).sum();
    Ok(DensityStats {
        mean_agents_per_sequence: total as f64 / seqs.len() as f64,
        total_agents: total,
    })
}
