//! Report directory layout:
//!
//! * `report.txt`: configuration echo and per-model summary
//! * `dataset.csv`: `x1,x2,label,origin,split`
//! * `loss_<model>.csv`: `epoch,loss`
//! * `pool_events.csv`: `epoch,layer,i,j,similarity,layer_size`
//! * `confusion_<model>.csv` (and `confusion_<model>_holdout.csv`)
//! * `boundary_<model>.csv`: `i,j,x1,x2,label` per grid cell
//! * `boundary_<model>.svg`, `loss_curves.svg`
//! * `network_<model>.fg` (graph view) and `network_<model>.weights`
//! * `loss_summary.csv`: loss every 1000 epochs for each model
//!
//! Numbers are written in shortest round-trip form, so loading a directory
//! gives back exactly the report that was emitted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::data::{Dataset, DatasetSpec, Origin, Point};
use super::metrics::{ConfusionMatrix, DecisionGrid};
use super::svg::{boundary_svg, loss_curves_svg};
use super::{ExperimentError, Mode, ModelKind, ModelRun, RunConfig, RunReport};
use crate::graph::serialize_graph;
use crate::nn::{net_to_fuzzy_graph, parse_weights, serialize_weights, EpochLog, MergeStrategy, PoolEvent, TrainConfig};

const SUMMARY_STEP: usize = 1000;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary sibling and a rename.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, ExperimentError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(path)
}

fn read(dir: &Path, name: &str) -> Result<String, ExperimentError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(io_err(&path))
}

fn join_sizes(sizes: &[usize]) -> String {
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn config_text(report: &RunReport) -> String {
    let c = &report.config;
    let t = &c.train;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "fuzzpool experiment report").unwrap();
    writeln!(w, "dataset: {}", c.dataset).unwrap();
    writeln!(w, "mode: {}", c.mode.as_str()).unwrap();
    writeln!(w, "seed: {}", t.seed).unwrap();
    writeln!(w, "layer_sizes: {}", join_sizes(&t.layer_sizes)).unwrap();
    writeln!(w, "epochs: {}", t.epochs).unwrap();
    writeln!(w, "learning_rate: {}", t.learning_rate).unwrap();
    writeln!(w, "pool_interval: {}", t.pool_interval).unwrap();
    writeln!(w, "tau: {}", t.tau).unwrap();
    writeln!(w, "merge: {}", t.merge.as_str()).unwrap();
    match c.holdout {
        Some(f) => writeln!(w, "holdout: {f}").unwrap(),
        None => writeln!(w, "holdout: none").unwrap(),
    }
    writeln!(w, "grid_resolution: {}", c.grid_resolution).unwrap();
    let evaluation = if c.holdout.is_some() {
        "training set, plus the held-out set"
    } else {
        "training set (no held-out split)"
    };
    writeln!(w, "evaluation: {evaluation}").unwrap();
    let table = report.train_set.points().iter().filter(|p| p.origin == Origin::Table).count();
    writeln!(w, "training_points: {} ({table} from the hand-listed table)", report.train_set.len()).unwrap();
    if let Some(h) = &report.holdout_set {
        writeln!(w, "holdout_points: {}", h.len()).unwrap();
    }
    for m in &report.models {
        writeln!(w).unwrap();
        writeln!(w, "[{}]", m.kind).unwrap();
        writeln!(w, "final_loss: {}", m.final_loss).unwrap();
        writeln!(w, "final_layer_sizes: {}", join_sizes(&m.network.layer_sizes())).unwrap();
        let c = m.confusion.counts;
        writeln!(w, "confusion: {} {} {} {}", c[0][0], c[0][1], c[1][0], c[1][1]).unwrap();
        writeln!(w, "accuracy: {}", m.confusion.accuracy()).unwrap();
        if let Some(h) = m.holdout_confusion {
            writeln!(w, "holdout_accuracy: {}", h.accuracy()).unwrap();
        }
        writeln!(w, "pool_events: {}", m.events.len()).unwrap();
        let spikes = m
            .events
            .iter()
            .map(|e| e.epoch)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .filter(|&e| matches!((m.loss_at(e + 1), m.loss_at(e.saturating_sub(1))), (Some(a), Some(b)) if a > b))
            .count();
        if !m.events.is_empty() {
            writeln!(w, "pool_epochs_with_loss_spike: {spikes}").unwrap();
        }
    }
    out
}

fn parse_config(text: &str) -> Result<(RunConfig, BTreeMap<ModelKind, f64>), ExperimentError> {
    let bad = |line: usize, message: String| ExperimentError::Parse {
        what: "report.txt".into(),
        line,
        message,
    };
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut final_losses = BTreeMap::new();
    let mut section: Option<ModelKind> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line == "[baseline]" {
            section = Some(ModelKind::Baseline);
        } else if line == "[pooling]" {
            section = Some(ModelKind::Pooling);
        } else if let Some((key, value)) = line.split_once(": ") {
            match section {
                None => {
                    fields.insert(key, (i + 1, value));
                }
                Some(kind) if key == "final_loss" => {
                    let v = value.parse::<f64>().map_err(|_| bad(i + 1, format!("bad loss {value:?}")))?;
                    final_losses.insert(kind, v);
                }
                Some(_) => {}
            }
        }
    }
    let get = |key: &str| fields.get(key).copied().ok_or_else(|| bad(0, format!("missing `{key}`")));
    fn parse<T: std::str::FromStr>(
        (line, value): (usize, &str),
        bad: impl Fn(usize, String) -> ExperimentError,
    ) -> Result<T, ExperimentError> {
        value.parse::<T>().map_err(|_| bad(line, format!("cannot parse {value:?}")))
    }
    let (line, sizes) = get("layer_sizes")?;
    let layer_sizes = sizes
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|_| bad(line, format!("bad layer size {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (line, merge) = get("merge")?;
    let merge: MergeStrategy = merge.parse().map_err(|e: crate::nn::NnError| bad(line, e.to_string()))?;
    let (line, mode) = get("mode")?;
    let mode: Mode = mode.parse().map_err(|e: String| bad(line, e))?;
    let (line, dataset) = get("dataset")?;
    let dataset: DatasetSpec = dataset.parse().map_err(|e: String| bad(line, e))?;
    let holdout = match get("holdout")? {
        (_, "none") => None,
        field => Some(parse::<f64>(field, bad)?),
    };
    let config = RunConfig {
        dataset,
        mode,
        train: TrainConfig {
            layer_sizes,
            learning_rate: parse(get("learning_rate")?, bad)?,
            epochs: parse(get("epochs")?, bad)?,
            pool_interval: parse(get("pool_interval")?, bad)?,
            tau: parse(get("tau")?, bad)?,
            merge,
            seed: parse(get("seed")?, bad)?,
            pooling_enabled: false,
        },
        holdout,
        grid_resolution: parse(get("grid_resolution")?, bad)?,
    };
    Ok((config, final_losses))
}

/// Splits a CSV with a known header into rows of fields.
fn csv_rows<'a>(text: &'a str, what: &str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>, ExperimentError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => {
            return Err(ExperimentError::Parse {
                what: what.into(),
                line: 1,
                message: format!("expected header {header:?}"),
            })
        }
    }
    let width = header.split(',').count();
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() == width {
                Ok((i + 1, fields))
            } else {
                Err(ExperimentError::Parse {
                    what: what.into(),
                    line: i + 1,
                    message: format!("expected {width} fields"),
                })
            }
        })
        .collect()
}

fn field<T: std::str::FromStr>(what: &str, line: usize, value: &str) -> Result<T, ExperimentError> {
    value.parse::<T>().map_err(|_| ExperimentError::Parse {
        what: what.into(),
        line,
        message: format!("cannot parse {value:?}"),
    })
}

const DATASET_HEADER: &str = "x1,x2,label,origin,split";
const LOSS_HEADER: &str = "epoch,loss";
const EVENTS_HEADER: &str = "epoch,layer,i,j,similarity,layer_size";
const CONFUSION_HEADER: &str = "actual,predicted_0,predicted_1";
const GRID_HEADER: &str = "i,j,x1,x2,label";

fn dataset_csv(report: &RunReport) -> String {
    let mut out = format!("{DATASET_HEADER}\n");
    let parts = std::iter::once(("train", &report.train_set)).chain(report.holdout_set.iter().map(|h| ("holdout", h)));
    for (split, set) in parts {
        for p in set.points() {
            writeln!(out, "{},{},{},{},{split}", p.x1, p.x2, p.label, p.origin.as_str()).unwrap();
        }
    }
    out
}

fn loss_csv(epochs: &[EpochLog]) -> String {
    let mut out = format!("{LOSS_HEADER}\n");
    for e in epochs {
        writeln!(out, "{},{}", e.epoch, e.loss).unwrap();
    }
    out
}

fn events_csv(events: &[PoolEvent]) -> String {
    let mut out = format!("{EVENTS_HEADER}\n");
    for e in events {
        writeln!(out, "{},{},{},{},{},{}", e.epoch, e.layer, e.i, e.j, e.similarity, e.layer_size).unwrap();
    }
    out
}

fn confusion_csv(m: &ConfusionMatrix) -> String {
    let c = m.counts;
    format!("{CONFUSION_HEADER}\n0,{},{}\n1,{},{}\n", c[0][0], c[0][1], c[1][0], c[1][1])
}

fn grid_csv(g: &DecisionGrid) -> String {
    let mut out = format!("{GRID_HEADER}\n");
    for j in 0..g.resolution {
        for i in 0..g.resolution {
            let (x1, x2) = DecisionGrid::center(g.resolution, i, j);
            writeln!(out, "{i},{j},{x1},{x2},{}", g.get(i, j)).unwrap();
        }
    }
    out
}

fn summary_csv(models: &[ModelRun]) -> String {
    let mut out = String::from("epoch");
    for m in models {
        write!(out, ",{}", m.kind).unwrap();
    }
    out.push('\n');
    let last = models.iter().map(|m| m.epochs.len()).max().unwrap_or(0);
    for epoch in (SUMMARY_STEP..=last).step_by(SUMMARY_STEP) {
        write!(out, "{epoch}").unwrap();
        for m in models {
            match m.loss_at(epoch) {
                Some(l) => write!(out, ",{l}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

fn svg_title(report: &RunReport, kind: ModelKind) -> String {
    format!("dataset {}: {} decision boundary", report.config.dataset, kind)
}

/// Writes (or rewrites) the SVG figures only.
pub fn render_figures(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for m in &report.models {
        let svg = boundary_svg(&m.grid, &report.train_set, &svg_title(report, m.kind));
        written.push(write_atomic(dir, &format!("boundary_{}.svg", m.kind), &svg)?);
    }
    written.push(write_atomic(dir, "loss_curves.svg", &loss_curves_svg(&report.models))?);
    Ok(written)
}

/// Writes the full report directory and returns the files written.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = vec![
        write_atomic(dir, "report.txt", &config_text(report))?,
        write_atomic(dir, "dataset.csv", &dataset_csv(report))?,
    ];
    let events: Vec<PoolEvent> = report.models.iter().flat_map(|m| m.events.iter().copied()).collect();
    written.push(write_atomic(dir, "pool_events.csv", &events_csv(&events))?);
    for m in &report.models {
        let k = m.kind;
        written.push(write_atomic(dir, &format!("loss_{k}.csv"), &loss_csv(&m.epochs))?);
        written.push(write_atomic(dir, &format!("confusion_{k}.csv"), &confusion_csv(&m.confusion))?);
        if let Some(h) = &m.holdout_confusion {
            written.push(write_atomic(dir, &format!("confusion_{k}_holdout.csv"), &confusion_csv(h))?);
        }
        written.push(write_atomic(dir, &format!("boundary_{k}.csv"), &grid_csv(&m.grid))?);
        let graph = net_to_fuzzy_graph(&m.network);
        written.push(write_atomic(dir, &format!("network_{k}.fg"), &serialize_graph(&graph.graph))?);
        written.push(write_atomic(dir, &format!("network_{k}.weights"), &serialize_weights(&m.network))?);
    }
    written.push(write_atomic(dir, "loss_summary.csv", &summary_csv(&report.models))?);
    written.extend(render_figures(report, dir)?);
    Ok(written)
}

fn load_dataset(text: &str) -> Result<(Dataset, Option<Dataset>), ExperimentError> {
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for (line, f) in csv_rows(text, "dataset.csv", DATASET_HEADER)? {
        let point = Point {
            x1: field("dataset.csv", line, f[0])?,
            x2: field("dataset.csv", line, f[1])?,
            label: field("dataset.csv", line, f[2])?,
            origin: field("dataset.csv", line, f[3])?,
        };
        match f[4] {
            "train" => train.push(point),
            "holdout" => holdout.push(point),
            other => {
                return Err(ExperimentError::Parse {
                    what: "dataset.csv".into(),
                    line,
                    message: format!("unknown split {other:?}"),
                })
            }
        }
    }
    let holdout = if holdout.is_empty() { None } else { Some(Dataset::from_labeled(holdout)?) };
    Ok((Dataset::from_labeled(train)?, holdout))
}

fn load_confusion(text: &str, what: &str) -> Result<ConfusionMatrix, ExperimentError> {
    let rows = csv_rows(text, what, CONFUSION_HEADER)?;
    if rows.len() != 2 {
        return Err(ExperimentError::Parse {
            what: what.into(),
            line: rows.len() + 1,
            message: "expected two rows".into(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (k, (line, f)) in rows.iter().enumerate() {
        m.counts[k] = [field(what, *line, f[1])?, field(what, *line, f[2])?];
    }
    Ok(m)
}

fn load_grid(text: &str, what: &str, resolution: usize) -> Result<DecisionGrid, ExperimentError> {
    let rows = csv_rows(text, what, GRID_HEADER)?;
    if rows.len() != resolution * resolution {
        return Err(ExperimentError::Parse {
            what: what.into(),
            line: rows.len() + 1,
            message: format!("expected {} cells", resolution * resolution),
        });
    }
    let mut cells = vec![0u8; resolution * resolution];
    for (line, f) in rows {
        let (i, j): (usize, usize) = (field(what, line, f[0])?, field(what, line, f[1])?);
        if i >= resolution || j >= resolution {
            return Err(ExperimentError::Parse {
                what: what.into(),
                line,
                message: "cell index out of range".into(),
            });
        }
        cells[j * resolution + i] = field(what, line, f[4])?;
    }
    Ok(DecisionGrid { resolution, cells })
}

/// Reads a directory written by [`emit_report`].
pub fn load_report(dir: &Path) -> Result<RunReport, ExperimentError> {
    let (config, final_losses) = parse_config(&read(dir, "report.txt")?)?;
    let (train_set, holdout_set) = load_dataset(&read(dir, "dataset.csv")?)?;
    let events_text = read(dir, "pool_events.csv")?;
    let events_rows = csv_rows(&events_text, "pool_events.csv", EVENTS_HEADER)?;
    let mut events = Vec::new();
    for (line, f) in events_rows {
        let w = "pool_events.csv";
        events.push(PoolEvent {
            epoch: field(w, line, f[0])?,
            layer: field(w, line, f[1])?,
            i: field(w, line, f[2])?,
            j: field(w, line, f[3])?,
            similarity: field(w, line, f[4])?,
            layer_size: field(w, line, f[5])?,
        });
    }
    let mut models = Vec::new();
    for &kind in config.mode.kinds() {
        let name = |stem: &str| format!("{stem}_{kind}");
        let loss_name = format!("{}.csv", name("loss"));
        let mut epochs = Vec::new();
        let loss_text = read(dir, &loss_name)?;
        for (line, f) in csv_rows(&loss_text, &loss_name, LOSS_HEADER)? {
            epochs.push(EpochLog {
                epoch: field(&loss_name, line, f[0])?,
                loss: field(&loss_name, line, f[1])?,
            });
        }
        let confusion_name = format!("{}.csv", name("confusion"));
        let confusion = load_confusion(&read(dir, &confusion_name)?, &confusion_name)?;
        let holdout_name = format!("{}_holdout.csv", name("confusion"));
        let holdout_confusion = if holdout_set.is_some() {
            Some(load_confusion(&read(dir, &holdout_name)?, &holdout_name)?)
        } else {
            None
        };
        let grid_name = format!("{}.csv", name("boundary"));
        let grid = load_grid(&read(dir, &grid_name)?, &grid_name, config.grid_resolution)?;
        let network = parse_weights(&read(dir, &format!("{}.weights", name("network")))?)?;
        let final_loss = *final_losses.get(&kind).ok_or_else(|| ExperimentError::Parse {
            what: "report.txt".into(),
            line: 0,
            message: format!("missing final_loss for {kind}"),
        })?;
        models.push(ModelRun {
            kind,
            epochs,
            events: if kind == ModelKind::Pooling { events.clone() } else { Vec::new() },
            network,
            final_loss,
            confusion,
            holdout_confusion,
            grid,
        });
    }
    Ok(RunReport {
        config,
        train_set,
        holdout_set,
        models,
        wall_clock_seconds: None,
    })
}
