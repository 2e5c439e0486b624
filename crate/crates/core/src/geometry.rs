//! Segment-segment distance and the discrete-step collision predicate.

use crate::error::{Error, Result};
use crate::trajdata::Position;

/// Default agent radius in meters.
pub const DEFAULT_RADIUS: f64 = 0.1;

/// A closed segment. `a == b` is allowed and behaves as a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Position,
    pub b: Position,
}

impl Segment {
    pub const fn new(a: Position, b: Position) -> Self {
        Segment { a, b }
    }

    pub fn point_at(&self, s: f64) -> Position {
        self.a + (self.b - self.a) * s
    }
}

/// Distance from `p` to the closed segment `seg`.
pub fn point_segment_distance(p: Position, seg: &Segment) -> f64 {
    let d = seg.b - seg.a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return p.dist(seg.a);
    }
    let s = ((p - seg.a).dot(d) / len_sq).clamp(0.0, 1.0);
    p.dist(seg.point_at(s))
}

fn orientation(a: Position, b: Position, c: Position) -> f64 {
    (b - a).cross(c - a)
}

fn within_box(a: Position, b: Position, p: Position) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True when the closed segments share at least one point.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> bool {
    let d1 = orientation(s2.a, s2.b, s1.a);
    let d2 = orientation(s2.a, s2.b, s1.b);
    let d3 = orientation(s1.a, s1.b, s2.a);
    let d4 = orientation(s1.a, s1.b, s2.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && within_box(s2.a, s2.b, s1.a))
        || (d2 == 0.0 && within_box(s2.a, s2.b, s1.b))
        || (d3 == 0.0 && within_box(s1.a, s1.b, s2.a))
        || (d4 == 0.0 && within_box(s1.a, s1.b, s2.b))
}

/// Exact Euclidean minimum distance between two closed segments.
///
/// Non-intersecting segments attain their minimum at an endpoint of one of
/// them, so the answer is the least of four point-segment distances.
pub fn segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    if segments_intersect(s1, s2) {
        return 0.0;
    }
    point_segment_distance(s1.a, s2)
        .min(point_segment_distance(s1.b, s2))
        .min(point_segment_distance(s2.a, s1))
        .min(point_segment_distance(s2.b, s1))
}

fn check_tracks(track_n: &[Position], track_m: &[Position]) -> Result<()> {
    if track_n.len() != track_m.len() {
        return Err(Error::shape("collision tracks", track_n.len(), track_m.len()));
    }
    if track_n.is_empty() {
        return Err(Error::Empty("collision tracks need at least one timestep".into()));
    }
    Ok(())
}

/// Smallest same-step segment distance between two tracks; point distance
/// for single-timestep tracks.
pub fn min_track_distance(track_n: &[Position], track_m: &[Position]) -> Result<f64> {
    check_tracks(track_n, track_m)?;
    if track_n.len() == 1 {
        return Ok(track_n[0].dist(track_m[0]));
    }
    Ok(track_n
        .windows(2)
        .zip(track_m.windows(2))
        .map(|(a, b)| segment_distance(&Segment::new(a[0], a[1]), &Segment::new(b[0], b[1])))
        .fold(f64::INFINITY, f64::min))
}

/// Whether two agents' motion segments of the same step come closer than
/// `2 * radius`. Exactly `2 * radius` is not a collision.
pub fn agents_collide(track_n: &[Position], track_m: &[Position], radius: f64) -> Result<bool> {
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be > 0, got {radius}")));
    }
    check_tracks(track_n, track_m)?;
    let threshold = 2.0 * radius;
    if track_n.len() == 1 {
        return Ok(track_n[0].dist(track_m[0]) < threshold);
    }
    Ok(track_n
        .windows(2)
        .zip(track_m.windows(2))
        .any(|(a, b)| segment_distance(&Segment::new(a[0], a[1]), &Segment::new(b[0], b[1])) < threshold))
}

/// Per-agent flag: does agent `n` collide with any other agent of this joint
/// sample? `sample` is agent-major with `pred_len` positions per agent.
pub fn collision_flags(sample: &[Position], pred_len: usize, radius: f64) -> Result<Vec<bool>> {
    if pred_len == 0 || !sample.len().is_multiple_of(pred_len) {
        return Err(Error::shape(
            "joint sample",
            format!("multiple of T={pred_len}"),
            sample.len(),
        ));
    }
    let n_agents = sample.len() / pred_len;
    let track = |n: usize| &sample[n * pred_len..(n + 1) * pred_len];
    let mut flags = vec![false; n_agents];
    for n in 0..n_agents {
        for m in n + 1..n_agents {
            if (flags[n] && flags[m]) || !agents_collide(track(n), track(m), radius)? {
                continue;
            }
            flags[n] = true;
            flags[m] = true;
        }
    }
    Ok(flags)
}

/// Continuous-time variant for sensitivity checks: both tracks are linearly
/// upsampled by `upsample` points per step and compared at equal times
/// only. Not the evaluation contract; agents crossing the same spot at
/// different moments within a step do not collide here.
pub fn time_aligned_collide(track_n: &[Position], track_m: &[Position], radius: f64, upsample: usize) -> Result<bool> {
    check_tracks(track_n, track_m)?;
    let threshold_sq = 4.0 * radius * radius;
    if track_n.len() == 1 {
        return Ok(track_n[0].dist_sq(track_m[0]) < threshold_sq);
    }
    let steps = upsample.max(1);
    for (a, b) in track_n.windows(2).zip(track_m.windows(2)) {
        let sa = Segment::new(a[0], a[1]);
        let sb = Segment::new(b[0], b[1]);
        for i in 0..=steps {
            let s = i as f64 / steps as f64;
            if sa.point_at(s).dist_sq(sb.point_at(s)) < threshold_sq {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
