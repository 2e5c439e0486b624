//! Parses an ETH/UCY-format file, cuts it into observation/prediction
//! windows and prints per-window agent counts and density.
//!
//! `cargo run --example window_dataset -- [FILE.txt]`

use std::path::PathBuf;

use trajeval::ingest::parse_ethucy;
use trajeval::trajdata::{density_stats, window_sequences, RecordingInfo};
use trajeval::{Units, WindowConfig};

fn main() -> trajeval::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini/plaza/plaza_a.txt"));
    let records = parse_ethucy(&path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("recording");
    let raw: Vec<_> = records.iter().map(|r| r.as_tuple()).collect();

    for require_full_presence in [true, false] {
        let cfg = WindowConfig {
            require_full_presence,
            ..WindowConfig::default()
        };
        let seqs = window_sequences(&raw, &cfg, &RecordingInfo::new("demo", stem, Units::Meters))?;
        println!("require_full_presence={require_full_presence}: {} windows", seqs.len());
        for s in &seqs {
            println!("  {:<14} agents {:?}", s.sequence_id, s.agent_ids());
        }
        if !seqs.is_empty() {
            let d = density_stats(&seqs)?;
            println!(
                "  mean agents per window {:.2}, total agent-windows {}",
                d.mean_agents_per_sequence, d.total_agents
            );
        }
    }
    Ok(())
}
