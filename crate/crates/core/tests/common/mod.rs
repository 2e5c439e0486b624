#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use trajeval::{Position, PredictionSet, Sequence, Units};

pub fn p(x: f64, y: f64) -> Position {
    Position::new(x, y)
}

/// A sequence with a straight two-step history ending at each agent's first
/// future position.
pub fn seq_with_future(id: &str, scene: &str, future: &[Vec<Position>]) -> Sequence {
    let n = future.len();
    let t = future[0].len();
    let obs: Vec<Position> = future
        .iter()
        .flat_map(|f| [f[0] - p(0.8, 0.0), f[0] - p(0.4, 0.0)])
        .collect();
    Sequence::new(
        id,
        scene,
        2.5,
        Units::Meters,
        (0..n as i64).collect(),
        2,
        obs,
        t,
        future.iter().flatten().copied().collect(),
    )
    .unwrap()
}

pub fn random_future<R: Rng>(rng: &mut R, n: usize, t: usize, spread: f64) -> Vec<Vec<Position>> {
    (0..n)
        .map(|_| {
            (0..t)
                .map(|_| p(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)))
                .collect()
        })
        .collect()
}

/// Random ground truth and K random samples scattered around it.
pub fn random_instance<R: Rng>(rng: &mut R, k: usize, n: usize, t: usize) -> (PredictionSet, Sequence) {
    let future = random_future(rng, n, t, 5.0);
    let seq = seq_with_future("r:0", "r", &future);
    let scale = rng.gen_range(0.05..3.0);
    let pred = PredictionSet::from_fn("r:0", k, n, t, |_, n, t| {
        future[n][t] + p(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
    .unwrap();
    (pred, seq)
}

pub fn random_dims<R: Rng>(rng: &mut R) -> (usize, usize, usize) {
    (rng.gen_range(1..=20), rng.gen_range(1..=10), rng.gen_range(1..=12))
}

/// Plain-loop reference values `[ade, fde, jade, jfde]` computed straight
/// from the definitions with index loops.
pub fn brute_metrics(pred: &PredictionSet, seq: &Sequence) -> [f64; 4] {
    let (k_total, n_total, t_total) = (pred.num_samples(), pred.num_agents(), pred.pred_len());
    let err = |k: usize, n: usize, t: usize| {
        let a = pred.get(k, n, t);
        let b = seq.future_track(n)[t];
        ((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)).sqrt()
    };
    let mut ade = 0.0;
    let mut fde = 0.0;
    for n in 0..n_total {
        let mut best_a = f64::INFINITY;
        let mut best_f = f64::INFINITY;
        for k in 0..k_total {
            let mut s = 0.0;
            for t in 0..t_total {
                s += err(k, n, t);
            }
            best_a = best_a.min(s / t_total as f64);
            best_f = best_f.min(err(k, n, t_total - 1));
        }
        ade += best_a;
        fde += best_f;
    }
    let mut jade = f64::INFINITY;
    let mut jfde = f64::INFINITY;
    for k in 0..k_total {
        let mut s = 0.0;
        let mut f = 0.0;
        for n in 0..n_total {
            for t in 0..t_total {
                s += err(k, n, t);
            }
            f += err(k, n, t_total - 1);
        }
        jade = jade.min(s / (n_total * t_total) as f64);
        jfde = jfde.min(f / n_total as f64);
    }
    [ade / n_total as f64, fde / n_total as f64, jade, jfde]
}

/// Minimum over `s, u ∈ {0, 1/m, …, 1}` of ‖(a0 + s·da) − (b0 + u·db)‖, and
/// the minimizing grid indices.
pub fn grid_segment_distance(a0: Position, a1: Position, b0: Position, b1: Position, m: usize) -> (f64, usize, usize) {
    let (da, db) = (a1 - a0, b1 - b0);
    let c2 = db.norm_sq();
    let mut best = (f64::INFINITY, 0, 0);
    let inv = 1.0 / m as f64;
    for i in 0..=m {
        let s = i as f64 * inv;
        let d = a0 + da * s - b0;
        let c0 = d.norm_sq();
        let c1 = -2.0 * d.dot(db);
        // four independent accumulators keep the inner loop vectorizable
        let mut acc = [f64::INFINITY; 4];
        let mut j = 0;
        while j + 4 <= m + 1 {
            for l in 0..4 {
                let u = (j + l) as f64 * inv;
                let v = c0 + u * (c1 + u * c2);
                acc[l] = if v < acc[l] { v } else { acc[l] };
            }
            j += 4;
        }
        let mut row = acc.iter().copied().fold(f64::INFINITY, f64::min);
        let mut row_j = usize::MAX;
        while j <= m {
            let u = j as f64 * inv;
            row = row.min(c0 + u * (c1 + u * c2));
            j += 1;
        }
        if row < best.0 {
            // recover the column only for improving rows
            for jj in 0..=m {
                let u = jj as f64 * inv;
                if c0 + u * (c1 + u * c2) == row {
                    row_j = jj;
                    break;
                }
            }
            best = (row, i, row_j);
        }
    }
    (best.0.max(0.0).sqrt(), best.1, best.2)
}

/// Minimum over the whole parameter square by nested ternary search. The
/// squared distance is convex in (s, u) and so is its partial minimum over
/// u, which makes both searches exact up to float resolution.
pub fn convex_segment_distance(a0: Position, a1: Position, b0: Position, b1: Position) -> f64 {
    let f = |s: f64, u: f64| (a0 + (a1 - a0) * s - (b0 + (b1 - b0) * u)).norm_sq();
    let inner = |s: f64| ternary(|u| f(s, u), 0.0, 1.0).1;
    let corners = [f(0.0, 0.0), f(0.0, 1.0), f(1.0, 0.0), f(1.0, 1.0)];
    let best = corners.iter().copied().fold(ternary(inner, 0.0, 1.0).1, f64::min);
    best.max(0.0).sqrt()
}

fn ternary(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x).min(f(lo)).min(f(hi)))
}

/// Central finite-difference gradient of `f` at `x`.
pub fn finite_difference(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + h;
            let up = f(&xp);
            xp[i] = orig - h;
            let down = f(&xp);
            xp[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// max |a − b| / max(max |b|, 1e-12).
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
    diff / scale
}

pub fn flatten(pred: &PredictionSet) -> Vec<f64> {
    pred.as_flat().iter().flat_map(|q| [q.x, q.y]).collect()
}

pub fn unflatten(like: &PredictionSet, flat: &[f64]) -> PredictionSet {
    PredictionSet::new(
        like.sequence_id.clone(),
        like.num_samples(),
        like.num_agents(),
        like.pred_len(),
        flat.chunks(2).map(|c| p(c[0], c[1])).collect(),
    )
    .unwrap()
}
