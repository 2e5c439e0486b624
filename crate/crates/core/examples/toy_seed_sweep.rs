//! Trains the marginal / joint / both grid on a toy scenario over a range of
//! seeds and prints final eval metrics, for both initialization schemes.
//!
//! `cargo run --release --example toy_seed_sweep -- crossing_pair 8`

use trajeval::toylab::{run_ablation, standard_grid, Init, ScenarioKind, ToyScenario, TrainConfig};

fn main() -> trajeval::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ScenarioKind = args.next().unwrap_or_else(|| "two_mode".into()).parse()?;
    let seeds: u64 = args.next().map(|s| s.parse().expect("seed count")).unwrap_or(8);
    println!("init,seed,config,ade,jade,cr_mean");
    for init in [Init::Gaussian, Init::FromData] {
        for seed in 0..seeds {
            let scn = match kind {
                ScenarioKind::TwoModeGroup => ToyScenario::two_mode(seed),
                ScenarioKind::CrossingPair => ToyScenario::crossing_pair(seed),
                ScenarioKind::Crowd => ToyScenario::crowd(seed),
            };
            let train = TrainConfig {
                init,
                seed,
                ..TrainConfig::default()
            };
            for row in run_ablation(&scn, &standard_grid(), &train)? {
                println!(
                    "{init:?},{seed},{},{:.4},{:.4},{:.3}",
                    row.name, row.eval.ade, row.eval.jade, row.eval.cr_mean
                );
            }
        }
    }
    Ok(())
}
