//! Trains the offset predictor on the two-mode toy scene with a marginal and
//! with a marginal+joint objective, printing the eval trace of each and the
//! closed-form optima for comparison.

use trajeval::geometry::DEFAULT_RADIUS;
use trajeval::losses::LossConfig;
use trajeval::toylab::{
    consistent_assignment, evaluate_predictor, generate, mix_and_match_assignment, oracle_predictor, train_predictor,
    ToyScenario, TrainConfig,
};

fn main() -> trajeval::Result<()> {
    let scn = ToyScenario::two_mode(0);
    let train = TrainConfig {
        log_every: 250,
        ..TrainConfig::default()
    };
    for (name, cfg) in [
        ("marginal", LossConfig::marginal_only()),
        ("marginal+joint", LossConfig::marginal_and_joint(1.0)),
    ] {
        let result = train_predictor(&scn, &cfg, &train)?;
        println!("== {name}");
        print!("{}", result.trace_csv());
    }

    let data = generate(&scn)?;
    for (name, assignment) in [
        ("mix-and-match", mix_and_match_assignment(2)),
        ("consistent", consistent_assignment(2)),
    ] {
        let e = evaluate_predictor(&oracle_predictor(&scn, &assignment)?, &data.eval, DEFAULT_RADIUS)?;
        println!(
            "{name:>14} optimum: ADE {:.4} JADE {:.4} CR_mean {:.3}",
            e.ade, e.jade, e.cr_mean
        );
    }
    Ok(())
}
