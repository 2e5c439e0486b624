//! Command-line harness: `evaluate`, `gt-stats`, `categorize` and `toy`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_RADIUS;
use crate::ingest::{discover_scenes, load_scene, parse_predictions, sequence_index, PredParseOptions};
use crate::interactions::{category_stats, classify, labels_to_csv, Category, InteractionThresholds};
use crate::losses::LossConfig;
use crate::metrics::{evaluate, gt_collision_rate, DistanceMode, EvalConfig, Metric, Weighting};
use crate::toylab::{
    ablation_csv, run_ablation, standard_grid, train_predictor, ScenarioKind, ToyScenario, TrainConfig,
};
use crate::trajdata::{density_stats, Sequence, WindowConfig};

pub const THREADS_ENV: &str = "TRAJEVAL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "trajeval",
    version,
    about = "Marginal and joint evaluation of multi-agent trajectory forecasts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a prediction dump against ground truth.
    Evaluate(EvaluateArgs),
    /// Ground-truth collision rate, density and interaction proportions.
    GtStats(GtStatsArgs),
    /// Write per-agent interaction labels as CSV.
    Categorize(CategorizeArgs),
    /// Train the toy predictor or run an ablation grid.
    Toy(ToyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    #[value(name = "per_sequence", alias = "per-sequence")]
    PerSequence,
    #[value(name = "per_agent", alias = "per-agent")]
    PerAgent,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::PerSequence => Weighting::PerSequence,
            WeightingArg::PerAgent => Weighting::PerAgent,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Ground-truth root: one directory per scene, or loose *.txt files.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub obs_len: usize,
    #[arg(long, default_value_t = 12)]
    pub pred_len: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Evaluation frame rate.
    #[arg(long, default_value_t = 2.5)]
    pub fps: f64,
    /// Rate of the frame-number clock in the files; defaults to --fps
    /// (files already at the evaluation rate).
    #[arg(long)]
    pub native_fps: Option<f64>,
    /// Downsampling phase.
    #[arg(long, default_value_t = 0)]
    pub phase: i64,
    /// Keep agents seen at the last observed frame and fill their gaps.
    #[arg(long)]
    pub partial_agents: bool,
}

impl DataArgs {
    fn window(&self) -> WindowConfig {
        WindowConfig {
            obs_len: self.obs_len,
            pred_len: self.pred_len,
            stride: self.stride,
            target_fps: self.fps,
            require_full_presence: !self.partial_agents,
        }
    }

    /// Loads every scene, in scene-name order.
    pub fn load(&self) -> Result<Vec<Sequence>> {
        let cfg = self.window();
        cfg.validate()?;
        let scenes = discover_scenes(&self.gt, self.native_fps.unwrap_or(self.fps))?;
        let mut seqs = Vec::new();
        for scene in &scenes {
            seqs.extend(load_scene(scene, &cfg, self.phase)?);
        }
        if seqs.is_empty() {
            return Err(Error::Empty(format!(
                "no sequences extracted from {}",
                self.gt.display()
            )));
        }
        Ok(seqs)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Prediction dump.
    #[arg(long)]
    pub pred: PathBuf,
    /// Expected number of samples per sequence.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Agent radius in scene units.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value = "ade,fde,jade,jfde,cr_mean,cr_jade")]
    pub metrics: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value = "per_sequence")]
    pub weighting: WeightingArg,
    /// Fail if any ground-truth sequence has no predictions.
    #[arg(long)]
    pub strict: bool,
    /// Use squared displacement instead of Euclidean distance.
    #[arg(long)]
    pub squared: bool,
    /// Accept sequences with fewer samples than the dump header's K.
    #[arg(long)]
    pub allow_ragged: bool,
    /// Include per-sequence reports in JSON output.
    #[arg(long)]
    pub per_sequence: bool,
    /// Evaluation is deterministic and draws no random numbers; accepted so
    /// every subcommand takes the same flag.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GtStatsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    /// Interaction thresholds file (key = value).
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CategorizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Interaction thresholds file (key = value).
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    /// two_mode, crossing_pair or crowd.
    #[arg(long, default_value = "two_mode")]
    pub scenario: String,
    /// Run the marginal / joint / both grid instead of one training run.
    #[arg(long)]
    pub ablation: bool,
    /// Loss for a single run: marginal, joint or both.
    #[arg(long, default_value = "both")]
    pub loss: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    /// Offset initialization: gaussian or data.
    #[arg(long, default_value = "gaussian")]
    pub init: String,
    #[arg(long)]
    pub mode_gap: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub log_every: usize,
    /// Output directory for trace / ablation CSVs.
    #[arg(long, default_value = "toy_out")]
    pub out: PathBuf,
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run_to(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a command writing its primary output to `out`. Honors
/// `TRAJEVAL_THREADS` by running inside a bounded thread pool.
pub fn run_to(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(threads) if threads > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| {
                let mut buf = Vec::new();
                dispatch(cli, &mut buf).map(|()| buf)
            })
            .and_then(|buf| out.write_all(&buf).map_err(|e| Error::io("<stdout>", e))),
        _ => dispatch(cli, out),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::GtStats(a) => cmd_gt_stats(&a, out),
        Command::Categorize(a) => cmd_categorize(&a, out),
        Command::Toy(a) => cmd_toy(&a, out),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn load_thresholds(path: Option<&PathBuf>) -> Result<InteractionThresholds> {
    match path {
        Some(p) => InteractionThresholds::load(p),
        None => Ok(InteractionThresholds::default()),
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let metrics = Metric::parse_list(&args.metrics)?;
    if !(args.radius > 0.0) {
        return Err(Error::Config(format!("radius must be > 0, got {}", args.radius)));
    }
    let seqs = args.data.load()?;
    let index = sequence_index(&seqs);
    let opts = PredParseOptions {
        allow_ragged_k: args.allow_ragged,
    };
    let dump = parse_predictions(&args.pred, &opts, Some(&index))?;
    if dump.num_samples != args.samples {
        return Err(Error::Config(format!(
            "prediction dump has K={} but --samples is {}",
            dump.num_samples, args.samples
        )));
    }
    if dump.pred_len != args.data.pred_len {
        return Err(Error::Config(format!(
            "prediction dump has T={} but --pred-len is {}",
            dump.pred_len, args.data.pred_len
        )));
    }
    let cfg = EvalConfig {
        metrics,
        radius: args.radius,
        distance: if args.squared {
            DistanceMode::Squared
        } else {
            DistanceMode::Euclidean
        },
        weighting: args.weighting.into(),
        strict: args.strict,
        ..EvalConfig::default()
    };
    let report = evaluate(&dump.sets, &seqs, &cfg)?;
    let text = match args.format {
        OutputFormat::Table => report.to_table(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(args.per_sequence) + "\n",
    };
    emit(&text, args.out.as_deref(), out)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SceneStats {
    pub num_sequences: usize,
    pub mean_agents_per_sequence: f64,
    pub total_agents: usize,
    pub gt_collision_rate: f64,
    pub categories: BTreeMap<String, f64>,
}

/// Per-scene ground-truth statistics plus an `average` entry (mean of the
/// scene collision rates) and `all` (pooled counts).
pub fn gt_stats(seqs: &[Sequence], radius: f64, thr: &InteractionThresholds) -> Result<BTreeMap<String, SceneStats>> {
    let cr = gt_collision_rate(seqs, radius, Weighting::PerSequence)?;
    let mut by_scene: BTreeMap<&str, Vec<Sequence>> = BTreeMap::new();
    for s in seqs {
        by_scene.entry(&s.scene_id).or_default().push(s.clone());
    }
    let cat = |seqs: &[Sequence]| -> BTreeMap<String, f64> {
        category_stats(seqs, thr)
            .into_iter()
            .map(|(c, v)| (c.name().to_string(), v))
            .collect()
    };
    let mut stats = BTreeMap::new();
    for (scene, group) in &by_scene {
        let d = density_stats(group)?;
        stats.insert(
            scene.to_string(),
            SceneStats {
                num_sequences: group.len(),
                mean_agents_per_sequence: d.mean_agents_per_sequence,
                total_agents: d.total_agents,
                gt_collision_rate: cr[*scene],
                categories: cat(group),
            },
        );
    }
    let d = density_stats(seqs)?;
    let average_cr = cr.values().sum::<f64>() / cr.len() as f64;
    stats.insert(
        "average".to_string(),
        SceneStats {
            num_sequences: seqs.len(),
            mean_agents_per_sequence: d.mean_agents_per_sequence,
            total_agents: d.total_agents,
            gt_collision_rate: average_cr,
            categories: cat(seqs),
        },
    );
    Ok(stats)
}

pub fn cmd_gt_stats(args: &GtStatsArgs, out: &mut dyn Write) -> Result<()> {
    let thr = load_thresholds(args.thresholds.as_ref())?;
    let seqs = args.data.load()?;
    let stats = gt_stats(&seqs, args.radius, &thr)?;
    let cats: Vec<&str> = Category::ALL.iter().map(|c| c.name()).collect();
    let text = match args.format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&json!({ "radius": args.radius, "scenes": stats })).expect("stats serialize")
                + "\n"
        }
        OutputFormat::Csv => {
            let mut s = format!(
                "scene,sequences,mean_agents,total_agents,gt_collision_rate,{}\n",
                cats.join(",")
            );
            for (scene, st) in &stats {
                s.push_str(&format!(
                    "{scene},{},{},{},{}",
                    st.num_sequences, st.mean_agents_per_sequence, st.total_agents, st.gt_collision_rate
                ));
                for c in &cats {
                    s.push_str(&format!(",{}", st.categories[*c]));
                }
                s.push('\n');
            }
            s
        }
        OutputFormat::Table => {
            let mut s = format!(
                "{:<10}{:>8}{:>10}{:>8}{:>10}{:>8}{:>8}{:>8}{:>8}\n",
                "scene", "seqs", "mean_N", "agents", "gt_cr", "group", "lf", "ca", "static"
            );
            for (scene, st) in &stats {
                s.push_str(&format!(
                    "{scene:<10}{:>8}{:>10.2}{:>8}{:>10.4}{:>8.3}{:>8.3}{:>8.3}{:>8.3}\n",
                    st.num_sequences,
                    st.mean_agents_per_sequence,
                    st.total_agents,
                    st.gt_collision_rate,
                    st.categories["group"],
                    st.categories["leader_follower"],
                    st.categories["collision_avoidance"],
                    st.categories["static"],
                ));
            }
            s
        }
    };
    emit(&text, args.out.as_deref(), out)
}

pub fn cmd_categorize(args: &CategorizeArgs, out: &mut dyn Write) -> Result<()> {
    let thr = load_thresholds(args.thresholds.as_ref())?;
    let seqs = args.data.load()?;
    let labels: Vec<_> = seqs.iter().map(|s| classify(s, &thr)).collect();
    emit(&labels_to_csv(&labels), args.out.as_deref(), out)
}

fn toy_loss(name: &str, omega: f64) -> Result<LossConfig> {
    match name {
        "marginal" => Ok(LossConfig::marginal_only()),
        "joint" => Ok(LossConfig::joint_only()),
        "both" => Ok(LossConfig::marginal_and_joint(omega)),
        other => Err(Error::Config(format!("unknown toy loss {other:?}"))),
    }
}

pub fn cmd_toy(args: &ToyArgs, out: &mut dyn Write) -> Result<()> {
    let kind: ScenarioKind = args.scenario.parse()?;
    let mut scn = match kind {
        ScenarioKind::TwoModeGroup => ToyScenario::two_mode(args.seed),
        ScenarioKind::CrossingPair => ToyScenario::crossing_pair(args.seed),
        ScenarioKind::Crowd => ToyScenario::crowd(args.seed),
    };
    if let Some(gap) = args.mode_gap {
        scn.mode_gap = gap;
    }
    scn.noise_std = args.noise;
    let train = TrainConfig {
        num_samples: args.samples,
        steps: args.steps,
        lr: args.lr,
        init: args.init.parse()?,
        seed: args.seed,
        log_every: args.log_every,
        ..TrainConfig::default()
    };
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let summary = if args.ablation {
        let mut grid = standard_grid();
        if let Some((_, cfg)) = grid.iter_mut().find(|(n, _)| n == "marginal+joint") {
            cfg.joint_weight = args.omega;
        }
        let rows = run_ablation(&scn, &grid, &train)?;
        let csv = ablation_csv(&rows);
        let path = args.out.join("ablation.csv");
        fs::write(&path, &csv).map_err(|e| Error::io(&path, e))?;
        csv
    } else {
        let cfg = toy_loss(&args.loss, args.omega)?;
        let result = train_predictor(&scn, &cfg, &train)?;
        let path = args.out.join("trace.csv");
        fs::write(&path, result.trace_csv()).map_err(|e| Error::io(&path, e))?;
        let last = result.final_point();
        format!(
            "scenario={} loss={} steps={} final_loss={:.6} ade={:.4} fde={:.4} jade={:.4} jfde={:.4} cr_mean={:.4}\n",
            args.scenario,
            args.loss,
            last.step,
            last.loss,
            last.eval.ade,
            last.eval.fde,
            last.eval.jade,
            last.eval.jfde,
            last.eval.cr_mean
        )
    };
    emit(&summary, None, out)
}
