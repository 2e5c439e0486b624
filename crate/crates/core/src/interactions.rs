//! Heuristic per-agent interaction labels: group, leader-follower,
//! collision-avoidance and static.
//!
//! Labels are computed on the full observed + future ground-truth window.
//! An agent's heading is the direction of its net displacement; agents that
//! move less than `static_disp` have no heading and never take part in the
//! heading-based categories.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::per_agent_collision_rate;
use crate::trajdata::{Position, PredictionSet, Sequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionThresholds {
    /// Max mean pairwise distance for a group, meters.
    pub d_group: f64,
    /// Max heading difference for "same direction", degrees.
    pub theta_parallel: f64,
    /// Max lateral offset from the other agent's heading line, meters.
    pub d_lf_lateral: f64,
    pub lf_gap_min: f64,
    pub lf_gap_max: f64,
    /// Closest-approach distance for collision avoidance, meters.
    pub d_ca: f64,
    /// Min heading difference for "not the same direction", degrees.
    pub theta_nonparallel: f64,
    pub static_disp: f64,
    pub speed_ratio_min: f64,
    pub speed_ratio_max: f64,
}

impl Default for InteractionThresholds {
    fn default() -> Self {
        InteractionThresholds {
            d_group: 2.0,
            theta_parallel: 15.0,
            d_lf_lateral: 0.5,
            lf_gap_min: 0.3,
            lf_gap_max: 3.0,
            d_ca: 1.0,
            theta_nonparallel: 15.0,
            static_disp: 0.5,
            speed_ratio_min: 0.5,
            speed_ratio_max: 2.0,
        }
    }
}

impl InteractionThresholds {
    pub fn validate(&self) -> Result<()> {
        let distances = [
            ("d_group", self.d_group),
            ("d_lf_lateral", self.d_lf_lateral),
            ("lf_gap_max", self.lf_gap_max),
            ("d_ca", self.d_ca),
            ("static_disp", self.static_disp),
            ("speed_ratio_max", self.speed_ratio_max),
        ];
        for (name, v) in distances {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.lf_gap_min >= 0.0 && self.lf_gap_min <= self.lf_gap_max) {
            return Err(Error::Config("lf_gap_min must lie in [0, lf_gap_max]".into()));
        }
        if !(self.speed_ratio_min >= 0.0 && self.speed_ratio_min <= self.speed_ratio_max) {
            return Err(Error::Config("speed_ratio_min must lie in [0, speed_ratio_max]".into()));
        }
        for (name, v) in [
            ("theta_parallel", self.theta_parallel),
            ("theta_nonparallel", self.theta_nonparallel),
        ] {
            if !(v > 0.0 && v < 180.0) {
                return Err(Error::Config(format!("{name} must be in (0, 180), got {v}")));
            }
        }
        Ok(())
    }

    /// Reads a flat `key = value` file. `#` starts a comment; unknown keys
    /// are errors. Keys not present keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut thr = InteractionThresholds::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: "thresholds".into(),
                line: i + 1,
                message,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("bad number {:?}", value.trim())))?;
            let slot = match key.trim() {
                "d_group" => &mut thr.d_group,
                "theta_parallel" => &mut thr.theta_parallel,
                "d_lf_lateral" => &mut thr.d_lf_lateral,
                "lf_gap_min" => &mut thr.lf_gap_min,
                "lf_gap_max" => &mut thr.lf_gap_max,
                "d_ca" => &mut thr.d_ca,
                "theta_nonparallel" => &mut thr.theta_nonparallel,
                "static_disp" => &mut thr.static_disp,
                "speed_ratio_min" => &mut thr.speed_ratio_min,
                "speed_ratio_max" => &mut thr.speed_ratio_max,
                other => return Err(err(format!("unknown key {other:?}"))),
            };
            *slot = value;
        }
        thr.validate()?;
        Ok(thr)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AgentLabels {
    pub group: bool,
    pub leader_follower: bool,
    pub collision_avoidance: bool,
    pub is_static: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Group,
    LeaderFollower,
    CollisionAvoidance,
    Static,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Group,
        Category::LeaderFollower,
        Category::CollisionAvoidance,
        Category::Static,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Group => "group",
            Category::LeaderFollower => "leader_follower",
            Category::CollisionAvoidance => "collision_avoidance",
            Category::Static => "static",
        }
    }
}

impl AgentLabels {
    pub fn has(&self, category: Category) -> bool {
        match category {
            Category::Group => self.group,
            Category::LeaderFollower => self.leader_follower,
            Category::CollisionAvoidance => self.collision_avoidance,
            Category::Static => self.is_static,
        }
    }
}

/// Labels for every agent of one sequence, in `seq.agent_ids()` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionLabels {
    pub sequence_id: String,
    pub agent_ids: Vec<i64>,
    pub labels: Vec<AgentLabels>,
}

struct Motion {
    track: Vec<Position>,
    /// Unit heading; `None` for static agents.
    heading: Option<Position>,
    speed: f64,
}

fn heading_difference_deg(a: Position, b: Position) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos().to_degrees()
}

pub fn classify(seq: &Sequence, thr: &InteractionThresholds) -> InteractionLabels {
    let motions: Vec<Motion> = (0..seq.num_agents())
        .map(|n| {
            let track = seq.full_track(n);
            let disp = *track.last().expect("non-empty track") - track[0];
            let dist = disp.norm();
            let steps = (track.len() - 1).max(1) as f64;
            Motion {
                heading: (dist >= thr.static_disp).then(|| disp * (1.0 / dist)),
                speed: dist / steps,
                track,
            }
        })
        .collect();

    let mut labels: Vec<AgentLabels> = motions
        .iter()
        .map(|m| AgentLabels {
            is_static: m.heading.is_none(),
            ..AgentLabels::default()
        })
        .collect();

    for (n, a) in motions.iter().enumerate() {
        let Some(ha) = a.heading else { continue };
        for (m, b) in motions.iter().enumerate() {
            if m == n {
                continue;
            }
            let Some(hb) = b.heading else { continue };
            let dtheta = heading_difference_deg(ha, hb);
            let dists: Vec<f64> = a.track.iter().zip(&b.track).map(|(p, q)| p.dist(*q)).collect();
            let mean_dist = dists.iter().sum::<f64>() / dists.len() as f64;
            let min_dist = dists.iter().copied().fold(f64::INFINITY, f64::min);

            let ratio = a.speed / b.speed;
            if mean_dist < thr.d_group
                && dtheta < thr.theta_parallel
                && ratio >= thr.speed_ratio_min
                && ratio <= thr.speed_ratio_max
            {
                labels[n].group = true;
            }

            if dtheta < thr.theta_parallel {
                // offsets of n relative to m's heading line, averaged over time
                let (mut along, mut lateral) = (0.0, 0.0);
                for (p, q) in a.track.iter().zip(&b.track) {
                    let rel = *p - *q;
                    along += rel.dot(hb);
                    lateral += rel.cross(hb).abs();
                }
                let len = a.track.len() as f64;
                let gap = (along / len).abs();
                if lateral / len < thr.d_lf_lateral && gap >= thr.lf_gap_min && gap <= thr.lf_gap_max {
                    labels[n].leader_follower = true;
                }
            }

            if min_dist < thr.d_ca && dtheta > thr.theta_nonparallel {
                labels[n].collision_avoidance = true;
            }
        }
    }

    InteractionLabels {
        sequence_id: seq.sequence_id.clone(),
        agent_ids: seq.agent_ids().to_vec(),
        labels,
    }
}

/// Agent-weighted proportion of agents in each category.
pub fn category_stats(seqs: &[Sequence], thr: &InteractionThresholds) -> BTreeMap<Category, f64> {
    let mut counts: BTreeMap<Category, usize> = Category::ALL.iter().map(|c| (*c, 0)).collect();
    let mut total = 0usize;
    for seq in seqs {
        let labels = classify(seq, thr);
        total += labels.labels.len();
        for l in &labels.labels {
            for c in Category::ALL {
                if l.has(c) {
                    *counts.get_mut(&c).expect("all categories present") += 1;
                }
            }
        }
    }
    counts
        .into_iter()
        .map(|(c, k)| (c, if total == 0 { 0.0 } else { k as f64 / total as f64 }))
        .collect()
}

/// CR_mean restricted to members of each category; `None` when a category
/// has no members.
pub fn cr_by_category(
    preds: &BTreeMap<String, PredictionSet>,
    seqs: &[Sequence],
    thr: &InteractionThresholds,
    radius: f64,
) -> Result<BTreeMap<Category, Option<f64>>> {
    let mut acc: BTreeMap<Category, (f64, usize)> = Category::ALL.iter().map(|c| (*c, (0.0, 0))).collect();
    for seq in seqs {
        let Some(pred) = preds.get(&seq.sequence_id) else {
            continue;
        };
        pred.check_matches(seq)?;
        let rates = per_agent_collision_rate(pred, radius)?;
        let labels = classify(seq, thr);
        for (rate, l) in rates.iter().zip(&labels.labels) {
            for c in Category::ALL {
                if l.has(c) {
                    let e = acc.get_mut(&c).expect("all categories present");
                    e.0 += rate;
                    e.1 += 1;
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(c, (s, k))| (c, (k > 0).then(|| s / k as f64)))
        .collect())
}

/// CSV `sequence_id,agent_id,group,leader_follower,collision_avoidance,static`.
pub fn labels_to_csv(all: &[InteractionLabels]) -> String {
    let mut out = String::from("sequence_id,agent_id,group,leader_follower,collision_avoidance,static\n");
    for seq in all {
        for (id, l) in seq.agent_ids.iter().zip(&seq.labels) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                seq.sequence_id,
                id,
                u8::from(l.group),
                u8::from(l.leader_follower),
                u8::from(l.collision_avoidance),
                u8::from(l.is_static)
            ));
        }
    }
    out
}
