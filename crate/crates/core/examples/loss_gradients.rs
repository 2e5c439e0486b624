//! Evaluates the marginal, joint and combined training losses on a random
//! prediction set and compares the analytic subgradient with central finite
//! differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajeval::losses::{combined_loss, LossConfig};
use trajeval::{Position, PredictionSet, Sequence, Units};

fn main() -> trajeval::Result<()> {
    let (k, n, t) = (4, 3, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pt = |s: f64| Position::new(rng.gen_range(-s..s), rng.gen_range(-s..s));
    let future: Vec<Position> = (0..n * t).map(|_| pt(3.0)).collect();
    let seq = Sequence::new(
        "demo:0",
        "demo",
        2.5,
        Units::Meters,
        vec![1, 2, 3],
        1,
        vec![pt(1.0); n],
        t,
        future.clone(),
    )?;
    let samples: Vec<Position> = (0..k)
        .flat_map(|_| future.iter().map(|f| *f + pt(1.0)).collect::<Vec<_>>())
        .collect();
    let pred = PredictionSet::new("demo:0", k, n, t, samples)?;

    for (name, cfg) in [
        ("marginal", LossConfig::marginal_only()),
        ("joint", LossConfig::joint_only()),
        ("marginal+joint", LossConfig::marginal_and_joint(1.0)),
    ] {
        let out = combined_loss(&pred, &seq, &cfg)?;
        let x: Vec<f64> = pred.as_flat().iter().flat_map(|q| [q.x, q.y]).collect();
        let h = 1e-5;
        let mut worst = 0.0f64;
        for i in 0..x.len() {
            let eval = |delta: f64| -> trajeval::Result<f64> {
                let mut xi = x.clone();
                xi[i] += delta;
                let moved = PredictionSet::new(
                    "demo:0",
                    k,
                    n,
                    t,
                    xi.chunks(2).map(|c| Position::new(c[0], c[1])).collect(),
                )?;
                Ok(combined_loss(&moved, &seq, &cfg)?.value)
            };
            let fd = (eval(h)? - eval(-h)?) / (2.0 * h);
            worst = worst.max((fd - out.grad[i]).abs());
        }
        println!(
            "{name:>15}: loss {:9.4}  active {:?}  max |grad - fd| {worst:.2e}",
            out.value, out.active
        );
    }
    Ok(())
}
