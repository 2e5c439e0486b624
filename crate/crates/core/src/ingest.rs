//! Readers and writers for the ETH/UCY (and TrajNet SDD) text format and the
//! prediction-dump format, plus frame-rate downsampling.
//!
//! # Prediction dump
//!
//! ```text
//! #trajeval-pred v1 K=<K> T=<T>
//! <sequence_id>\t<sample_k>\t<agent_id>\t<t>\t<x>\t<y>
//! ```
//!
//! `sample_k` runs over `0..K`, `t` over `1..=T`. Other lines starting with
//! `#` are comments. Coordinates are written as shortest round-trip decimals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajdata::{window_sequences, Position, PredictionSet, RecordingInfo, Sequence, Units, WindowConfig};

pub const PRED_HEADER_MAGIC: &str = "#trajeval-pred v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub frame: i64,
    pub agent_id: i64,
    pub pos: Position,
}

impl RawRecord {
    pub fn as_tuple(&self) -> (i64, i64, Position) {
        (self.frame, self.agent_id, self.pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetName {
    Eth,
    Hotel,
    Univ,
    Zara1,
    Zara2,
    SddTrajnet,
}

impl DatasetName {
    pub const ETH_UCY: [DatasetName; 5] = [
        DatasetName::Eth,
        DatasetName::Hotel,
        DatasetName::Univ,
        DatasetName::Zara1,
        DatasetName::Zara2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetName::Eth => "eth",
            DatasetName::Hotel => "hotel",
            DatasetName::Univ => "univ",
            DatasetName::Zara1 => "zara1",
            DatasetName::Zara2 => "zara2",
            DatasetName::SddTrajnet => "sdd_trajnet",
        }
    }

    pub fn parse(name: &str) -> Option<DatasetName> {
        match name.to_ascii_lowercase().as_str() {
            "eth" => Some(DatasetName::Eth),
            "hotel" => Some(DatasetName::Hotel),
            "univ" => Some(DatasetName::Univ),
            "zara1" => Some(DatasetName::Zara1),
            "zara2" => Some(DatasetName::Zara2),
            "sdd" | "sdd_trajnet" | "trajnet" => Some(DatasetName::SddTrajnet),
            _ => None,
        }
    }

    pub fn units(self) -> Units {
        match self {
            DatasetName::SddTrajnet => Units::Pixels,
            _ => Units::Meters,
        }
    }
}

/// One dataset scene and where its files live.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub units: Units,
    /// Rate of the frame-number clock in the files.
    pub native_fps: f64,
    pub files: Vec<PathBuf>,
}

/// A collection of scenes, optionally with one held out for leave-one-out
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetCollection {
    pub scenes: Vec<DatasetSpec>,
    pub leave_out_scene: Option<String>,
}

impl DatasetCollection {
    pub fn new(scenes: Vec<DatasetSpec>, leave_out_scene: Option<String>) -> Result<Self> {
        if let Some(held) = &leave_out_scene {
            if !scenes.iter().any(|s| &s.name == held) {
                return Err(Error::Config(format!("leave-out scene {held} is not in the dataset")));
            }
        }
        Ok(DatasetCollection {
            scenes,
            leave_out_scene,
        })
    }

    /// (training scenes, evaluation scenes). Without a held-out scene every
    /// scene is an evaluation scene.
    pub fn split(&self) -> (Vec<&DatasetSpec>, Vec<&DatasetSpec>) {
        match &self.leave_out_scene {
            Some(held) => self.scenes.iter().partition(|s| &s.name != held),
            None => (Vec::new(), self.scenes.iter().collect()),
        }
    }
}

fn parse_int_tolerant(tok: &str) -> Option<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    let f = tok.parse::<f64>().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

fn parse_coord(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses whitespace-separated `frame agent_id x y` lines.
pub fn parse_ethucy_str(text: &str, source: &str) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 4 {
            return Err(err(format!("expected 4 fields, found {}", toks.len())));
        }
        let frame = parse_int_tolerant(toks[0]).ok_or_else(|| err(format!("bad frame {:?}", toks[0])))?;
        if frame < 0 {
            return Err(err(format!("negative frame {frame}")));
        }
        let agent_id = parse_int_tolerant(toks[1]).ok_or_else(|| err(format!("bad agent id {:?}", toks[1])))?;
        let x = parse_coord(toks[2]).ok_or_else(|| err(format!("bad x {:?}", toks[2])))?;
        let y = parse_coord(toks[3]).ok_or_else(|| err(format!("bad y {:?}", toks[3])))?;
        out.push(RawRecord {
            frame,
            agent_id,
            pos: Position::new(x, y),
        });
    }
    Ok(out)
}

pub fn parse_ethucy(path: impl AsRef<Path>) -> Result<Vec<RawRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ethucy_str(&text, &path.display().to_string())
}

/// Keeps frames with `frame % k == phase`, `k = native_fps / target_fps`.
pub fn downsample(records: &[RawRecord], native_fps: f64, target_fps: f64, phase: i64) -> Result<Vec<RawRecord>> {
    if !(native_fps > 0.0 && target_fps > 0.0) {
        return Err(Error::Config("frame rates must be positive".into()));
    }
    let ratio = native_fps / target_fps;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Config(format!(
            "target fps {target_fps} does not evenly divide native fps {native_fps}"
        )));
    }
    let k = k as i64;
    if !(0..k).contains(&phase) {
        return Err(Error::Config(format!("phase {phase} outside 0..{k}")));
    }
    Ok(records
        .iter()
        .copied()
        .filter(|r| r.frame.rem_euclid(k) == phase)
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct PredParseOptions {
    /// Accept sequences with fewer samples than the header's K.
    pub allow_ragged_k: bool,
}

/// Sequence shapes used to validate a dump: id → agent ids in order.
pub type SequenceIndex = BTreeMap<String, Vec<i64>>;

pub fn sequence_index(seqs: &[Sequence]) -> SequenceIndex {
    seqs.iter()
        .map(|s| (s.sequence_id.clone(), s.agent_ids().to_vec()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionDump {
    pub num_samples: usize,
    pub pred_len: usize,
    pub sets: BTreeMap<String, PredictionSet>,
}

fn parse_header(line: &str, source: &str, line_no: usize) -> Result<(usize, usize)> {
    let err = |message: String| Error::Parse {
        path: source.to_string(),
        line: line_no,
        message,
    };
    let rest = line
        .strip_prefix(PRED_HEADER_MAGIC)
        .ok_or_else(|| err(format!("expected header starting with {PRED_HEADER_MAGIC:?}")))?;
    let mut k = None;
    let mut t = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("K", v)) => k = v.parse::<usize>().ok(),
            Some(("T", v)) => t = v.parse::<usize>().ok(),
            _ => return Err(err(format!("unexpected header token {tok:?}"))),
        }
    }
    match (k, t) {
        (Some(k), Some(t)) if k >= 1 && t >= 1 => Ok((k, t)),
        _ => Err(err("header must carry K=<K> T=<T> with K, T >= 1".into())),
    }
}

/// (k, agent, t) -> position and the line it came from.
type Cells = BTreeMap<(usize, i64, usize), (Position, usize)>;

/// Parses a prediction dump. When `index` is given, every sequence must be in
/// it and agents are ordered as in the index; otherwise agents are ordered
/// by id.
pub fn parse_predictions_str(
    text: &str,
    source: &str,
    opts: &PredParseOptions,
    index: Option<&SequenceIndex>,
) -> Result<PredictionDump> {
    let mut header: Option<(usize, usize)> = None;
    let mut cells: BTreeMap<String, Cells> = BTreeMap::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with(PRED_HEADER_MAGIC) {
            if header.is_some() {
                return Err(Error::Parse {
                    path: source.into(),
                    line: line_no,
                    message: "duplicate header".into(),
                });
            }
            header = Some(parse_header(line, source, line_no)?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            message,
        };
        let (k_max, t_max) = header.ok_or_else(|| err("data line before header".into()))?;
        let toks: Vec<&str> = line.split('\t').collect();
        if toks.len() != 6 {
            return Err(err(format!("expected 6 tab-separated fields, found {}", toks.len())));
        }
        let seq_id = toks[0];
        let k: usize = toks[1]
            .parse()
            .map_err(|_| err(format!("bad sample index {:?}", toks[1])))?;
        let agent = parse_int_tolerant(toks[2]).ok_or_else(|| err(format!("bad agent id {:?}", toks[2])))?;
        let t: usize = toks[3]
            .parse()
            .map_err(|_| err(format!("bad timestep {:?}", toks[3])))?;
        let x = parse_coord(toks[4]).ok_or_else(|| err(format!("bad x {:?}", toks[4])))?;
        let y = parse_coord(toks[5]).ok_or_else(|| err(format!("bad y {:?}", toks[5])))?;
        if k >= k_max {
            return Err(err(format!("sample index {k} outside 0..{k_max}")));
        }
        if t == 0 || t > t_max {
            return Err(err(format!("timestep {t} outside 1..={t_max}")));
        }
        if let Some(index) = index {
            let agents = index
                .get(seq_id)
                .ok_or_else(|| Error::UnknownSequence(seq_id.to_string()))?;
            if !agents.contains(&agent) {
                return Err(err(format!("agent {agent} is not part of sequence {seq_id}")));
            }
        }
        let prev = cells
            .entry(seq_id.to_string())
            .or_default()
            .insert((k, agent, t), (Position::new(x, y), line_no));
        if let Some((_, first)) = prev {
            return Err(err(format!(
                "duplicate cell (sequence {seq_id}, sample {k}, agent {agent}, t={t}); first seen at line {first}"
            )));
        }
    }

    let (num_samples, pred_len) = header.ok_or_else(|| Error::Parse {
        path: source.into(),
        line: 0,
        message: "missing header".into(),
    })?;

    let mut sets = BTreeMap::new();
    for (seq_id, grid) in cells {
        let agent_ids: Vec<i64> = match index.and_then(|ix| ix.get(&seq_id)) {
            Some(ids) => ids.clone(),
            None => grid
                .keys()
                .map(|&(_, a, _)| a)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        let k_seq = if opts.allow_ragged_k {
            grid.keys().map(|&(k, _, _)| k + 1).max().unwrap_or(0)
        } else {
            num_samples
        };
        let mut samples = Vec::with_capacity(k_seq * agent_ids.len() * pred_len);
        for k in 0..k_seq {
            for &agent in &agent_ids {
                for t in 1..=pred_len {
                    let (p, _) = grid.get(&(k, agent, t)).ok_or_else(|| Error::MissingCell {
                        sequence_id: seq_id.clone(),
                        sample: k,
                        agent_id: agent,
                        t,
                    })?;
                    samples.push(*p);
                }
            }
        }
        let set =
            PredictionSet::new(seq_id.clone(), k_seq, agent_ids.len(), pred_len, samples)?.with_agent_ids(agent_ids)?;
        sets.insert(seq_id, set);
    }
    Ok(PredictionDump {
        num_samples,
        pred_len,
        sets,
    })
}

pub fn parse_predictions(
    path: impl AsRef<Path>,
    opts: &PredParseOptions,
    index: Option<&SequenceIndex>,
) -> Result<PredictionDump> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions_str(&text, &path.display().to_string(), opts, index)
}

/// Serializes prediction sets in (sequence, sample, agent, t) order. The
/// header K is the largest K among the sets; all sets must share T.
pub fn format_predictions(sets: &BTreeMap<String, PredictionSet>) -> Result<String> {
    let pred_len = match sets.values().next() {
        Some(s) => s.pred_len(),
        None => return Err(Error::Empty("no prediction sets to write".into())),
    };
    if let Some(s) = sets.values().find(|s| s.pred_len() != pred_len) {
        return Err(Error::shape(format!("T of {}", s.sequence_id), pred_len, s.pred_len()));
    }
    let k_max = sets.values().map(PredictionSet::num_samples).max().unwrap_or(1);
    let mut out = format!("{PRED_HEADER_MAGIC} K={k_max} T={pred_len}\n");
    for (seq_id, set) in sets {
        if seq_id.contains('\t') || seq_id.contains('\n') {
            return Err(Error::Config(format!(
                "sequence id {seq_id:?} contains a tab or newline"
            )));
        }
        for k in 0..set.num_samples() {
            for (n, agent) in set.agent_ids().iter().enumerate() {
                for (t, p) in set.track(k, n).iter().enumerate() {
                    writeln!(out, "{seq_id}\t{k}\t{agent}\t{}\t{}\t{}", t + 1, p.x, p.y).expect("write to String");
                }
            }
        }
    }
    Ok(out)
}

pub fn write_predictions(sets: &BTreeMap<String, PredictionSet>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = format_predictions(sets)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn txt_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    Ok(files)
}

/// Discovers scenes under `root`.
///
/// Each subdirectory is a scene; its files are `<scene>/test/*.txt` when a
/// `test/` directory exists, otherwise `<scene>/*.txt`. Loose `*.txt` files
/// directly under `root` are single-file scenes named after their stem.
pub fn discover_scenes(root: impl AsRef<Path>, native_fps: f64) -> Result<Vec<DatasetSpec>> {
    let root = root.as_ref();
    let mut scenes = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for path in entries {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let units = DatasetName::parse(&name).map(DatasetName::units).unwrap_or_default();
        if path.is_dir() {
            let test_dir = path.join("test");
            let files = if test_dir.is_dir() {
                txt_files(&test_dir)?
            } else {
                txt_files(&path)?
            };
            if !files.is_empty() {
                scenes.push(DatasetSpec {
                    name,
                    units,
                    native_fps,
                    files,
                });
            }
        } else if path.extension().is_some_and(|x| x == "txt") {
            scenes.push(DatasetSpec {
                name,
                units,
                native_fps,
                files: vec![path],
            });
        }
    }
    if scenes.is_empty() {
        return Err(Error::Empty(format!("no scenes found under {}", root.display())));
    }
    Ok(scenes)
}

/// Parses, downsamples and windows every file of a scene. Files are windowed
/// independently so no sequence spans two recordings.
pub fn load_scene(spec: &DatasetSpec, cfg: &WindowConfig, phase: i64) -> Result<Vec<Sequence>> {
    let mut seqs = Vec::new();
    for file in &spec.files {
        let records = downsample(&parse_ethucy(file)?, spec.native_fps, cfg.target_fps, phase)?;
        let recording = file
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&spec.name)
            .to_string();
        let info = RecordingInfo::new(spec.name.clone(), recording, spec.units);
        let raw: Vec<_> = records.iter().map(RawRecord::as_tuple).collect();
        seqs.extend(window_sequences(&raw, cfg, &info)?);
    }
    Ok(seqs)
}
