//! Metrics and losses on plain `(K, N, T, 2)` / `(N, T, 2)` arrays, the
//! interface intended for foreign-language bindings.

use trajeval::arrays::{losses_from_arrays, metrics_from_arrays};
use trajeval::losses::LossConfig;
use trajeval::metrics::EvalConfig;

fn main() -> trajeval::Result<()> {
    // two agents, two timesteps, two samples that each get one agent right
    let gt = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let pred = [
        0.0, 0.0, 1.0, 0.0, 0.0, 2.0, 1.0, 2.0, //
        0.0, -1.0, 1.0, -1.0, 0.0, 1.0, 1.0, 1.0,
    ];
    let metrics = metrics_from_arrays(&pred, [2, 2, 2, 2], &gt, [2, 2, 2], &EvalConfig::default())?;
    for (name, value) in &metrics {
        println!("{name:>8} {value:.4}");
    }
    let (loss, grad) = losses_from_arrays(
        &pred,
        [2, 2, 2, 2],
        &gt,
        [2, 2, 2],
        &LossConfig::marginal_and_joint(1.0),
    )?;
    println!("loss {loss:.4}, gradient {grad:?}");

    match metrics_from_arrays(&pred, [2, 2, 2, 2], &gt[..6], [1, 3, 2], &EvalConfig::default()) {
        Err(e) => println!("shape mismatch reported: {e}"),
        Ok(_) => unreachable!("mismatched shapes are rejected"),
    }
    Ok(())
}
