//! Segment distances and the collision predicate on a few hand-made cases.

use trajeval::geometry::{agents_collide, min_track_distance, segment_distance, Segment, DEFAULT_RADIUS};
use trajeval::Position;

fn p(x: f64, y: f64) -> Position {
    Position::new(x, y)
}

fn main() -> trajeval::Result<()> {
    let cases = [
        (
            "crossing",
            Segment::new(p(0.0, 0.0), p(1.0, 1.0)),
            Segment::new(p(0.0, 1.0), p(1.0, 0.0)),
        ),
        (
            "parallel",
            Segment::new(p(0.0, 0.0), p(1.0, 0.0)),
            Segment::new(p(0.0, 0.3), p(1.0, 0.3)),
        ),
        (
            "endpoint",
            Segment::new(p(0.0, 0.0), p(1.0, 0.0)),
            Segment::new(p(2.0, 1.0), p(3.0, 1.0)),
        ),
        (
            "point",
            Segment::new(p(0.5, 0.5), p(0.5, 0.5)),
            Segment::new(p(0.0, 0.0), p(1.0, 0.0)),
        ),
    ];
    for (name, s1, s2) in cases {
        println!("{name:>9}: distance {:.4}", segment_distance(&s1, &s2));
    }

    // two walkers swapping places: their positions never coincide at a
    // sampled step, but their motion segments cross
    let a = [p(-0.6, 0.0), p(0.6, 0.0)];
    let b = [p(0.6, 0.05), p(-0.6, 0.05)];
    println!(
        "swap: min segment distance {:.3}, collide at b={DEFAULT_RADIUS}: {}",
        min_track_distance(&a, &b)?,
        agents_collide(&a, &b, DEFAULT_RADIUS)?
    );
    Ok(())
}
