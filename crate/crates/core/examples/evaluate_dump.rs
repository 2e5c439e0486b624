//! Scores a prediction dump against a ground-truth directory and prints the
//! per-scene table, then the same report as CSV.
//!
//! `cargo run --example evaluate_dump -- [GT_DIR PRED_FILE]`
//! (defaults to the bundled test fixture).

use std::path::PathBuf;

use trajeval::ingest::{discover_scenes, load_scene, parse_predictions, sequence_index, PredParseOptions};
use trajeval::metrics::{evaluate, EvalConfig, Metric};
use trajeval::WindowConfig;

fn main() -> trajeval::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut args = std::env::args().skip(1);
    let gt = args.next().map(PathBuf::from).unwrap_or_else(|| fixtures.join("mini"));
    let pred = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| fixtures.join("mini_pred.txt"));

    let window = WindowConfig::default();
    let mut seqs = Vec::new();
    for scene in discover_scenes(&gt, window.target_fps)? {
        seqs.extend(load_scene(&scene, &window, 0)?);
    }
    let dump = parse_predictions(&pred, &PredParseOptions::default(), Some(&sequence_index(&seqs)))?;
    println!("{} sequences, K={}, T={}", seqs.len(), dump.num_samples, dump.pred_len);

    let cfg = EvalConfig {
        metrics: Metric::ALL.to_vec(),
        ..EvalConfig::default()
    };
    let report = evaluate(&dump.sets, &seqs, &cfg)?;
    print!("{}", report.to_table());
    println!();
    print!("{}", report.to_csv());
    Ok(())
}
