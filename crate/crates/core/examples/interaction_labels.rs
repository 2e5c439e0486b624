//! Labels constructed two-agent scenes with the interaction heuristics and
//! prints the per-agent CSV.

use trajeval::interactions::{classify, labels_to_csv, InteractionThresholds};
use trajeval::{Position, Sequence, Units};

fn walk(id: &str, a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> trajeval::Result<Sequence> {
    let track = |(x, y, vx, vy): (f64, f64, f64, f64)| -> Vec<Position> {
        (0..20)
            .map(|i| Position::new(x + vx * i as f64, y + vy * i as f64))
            .collect()
    };
    let (ta, tb) = (track(a), track(b));
    let obs = ta[..8].iter().chain(&tb[..8]).copied().collect();
    let fut = ta[8..].iter().chain(&tb[8..]).copied().collect();
    Sequence::new(id, "demo", 2.5, Units::Meters, vec![1, 2], 8, obs, 12, fut)
}

fn main() -> trajeval::Result<()> {
    let thr = InteractionThresholds::default();
    let scenes = [
        walk("side_by_side:0", (0.0, 0.0, 0.4, 0.0), (0.0, 0.7, 0.4, 0.0))?,
        walk("head_on:0", (-4.0, 0.0, 0.4, 0.0), (4.0, 0.5, -0.4, 0.0))?,
        walk("tandem:0", (0.0, 0.0, 0.4, 0.0), (-1.0, 0.0, 0.4, 0.0))?,
        walk("bystander:0", (0.0, 0.0, 0.0, 0.0), (-3.0, 1.5, 0.4, 0.0))?,
    ];
    let labels: Vec<_> = scenes.iter().map(|s| classify(s, &thr)).collect();
    print!("{}", labels_to_csv(&labels));
    Ok(())
}
