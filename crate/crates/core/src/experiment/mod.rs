//! Baseline-versus-pooling training experiments on the two point datasets.

mod data;
mod metrics;
mod report;
mod svg;

pub use data::{
    dataset1, dataset2, label_for, parse_points, table1_points, table2_points, Dataset, DatasetSpec, Origin, Point,
};
pub use metrics::{confusion, decision_grid, predict_class, ConfusionMatrix, DecisionGrid};
pub use report::{emit_report, load_report, render_figures};
pub use svg::{boundary_svg, loss_curves_svg};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::nn::{train, EpochLog, Network, NnError, PoolEvent, TrainConfig};
use crate::par;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid data: {0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what} line {line}: {message}")]
    Parse { what: String, line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Baseline,
    Pooling,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Pooling => "pooling",
            Mode::Both => "both",
        }
    }

    pub fn kinds(self) -> &'static [ModelKind] {
        match self {
            Mode::Baseline => &[ModelKind::Baseline],
            Mode::Pooling => &[ModelKind::Pooling],
            Mode::Both => &[ModelKind::Baseline, ModelKind::Pooling],
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "pooling" => Ok(Mode::Pooling),
            "both" => Ok(Mode::Both),
            other => Err(format!("unknown mode {other:?}; expected baseline, pooling or both")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    Baseline,
    Pooling,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Baseline => "baseline",
            ModelKind::Pooling => "pooling",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    pub mode: Mode,
    /// Shared by both models; `pooling_enabled` is set per model.
    pub train: TrainConfig,
    /// Fraction of points held out from training, if any.
    pub holdout: Option<f64>,
    pub grid_resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: DatasetSpec::One,
            mode: Mode::Both,
            train: TrainConfig::default(),
            holdout: None,
            grid_resolution: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRun {
    pub kind: ModelKind,
    pub epochs: Vec<EpochLog>,
    pub events: Vec<PoolEvent>,
    pub network: Network,
    /// Loss of the final network on the training points.
    pub final_loss: f64,
    pub confusion: ConfusionMatrix,
    pub holdout_confusion: Option<ConfusionMatrix>,
    pub grid: DecisionGrid,
}

impl ModelRun {
    /// Logged loss at `epoch`, if that epoch ran.
    pub fn loss_at(&self, epoch: usize) -> Option<f64> {
        epoch
            .checked_sub(1)
            .and_then(|i| self.epochs.get(i))
            .filter(|e| e.epoch == epoch)
            .map(|e| e.loss)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: RunConfig,
    pub train_set: Dataset,
    pub holdout_set: Option<Dataset>,
    pub models: Vec<ModelRun>,
    /// Measured by the caller; never written to the report directory, so
    /// that reruns stay byte-identical.
    pub wall_clock_seconds: Option<f64>,
}

impl RunReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelRun> {
        self.models.iter().find(|m| m.kind == kind)
    }
}

fn run_model(
    kind: ModelKind,
    config: &RunConfig,
    train_set: &Dataset,
    holdout_set: Option<&Dataset>,
) -> Result<ModelRun, ExperimentError> {
    let train_config = TrainConfig {
        pooling_enabled: kind == ModelKind::Pooling,
        ..config.train.clone()
    };
    let samples = train_set.to_samples();
    let outcome = train(&train_config, &samples)?;
    let network = outcome.network;
    Ok(ModelRun {
        kind,
        final_loss: network.loss(&samples)?,
        confusion: confusion(&network, train_set)?,
        holdout_confusion: holdout_set.map(|h| confusion(&network, h)).transpose()?,
        grid: decision_grid(&network, config.grid_resolution)?,
        epochs: outcome.epochs,
        events: outcome.events,
        network,
    })
}

/// Trains the requested models from the same seed; with both requested the
/// two runs proceed concurrently.
pub fn run_experiment(config: &RunConfig) -> Result<RunReport, ExperimentError> {
    config.train.validate()?;
    if config.grid_resolution == 0 {
        return Err(ExperimentError::InvalidConfig("grid resolution must be at least 1".into()));
    }
    let full = config.dataset.build()?;
    let (train_set, holdout_set) = match config.holdout {
        Some(fraction) => {
            let (a, b) = full.split_holdout(fraction, config.train.seed)?;
            (a, Some(b))
        }
        None => (full, None),
    };
    let run = |kind| run_model(kind, config, &train_set, holdout_set.as_ref());
    let models = match config.mode {
        Mode::Baseline => vec![run(ModelKind::Baseline)?],
        Mode::Pooling => vec![run(ModelKind::Pooling)?],
        Mode::Both => {
            let (b, p) = par::join(|| run(ModelKind::Baseline), || run(ModelKind::Pooling));
            vec![b?, p?]
        }
    };
    Ok(RunReport {
        config: config.clone(),
        train_set,
        holdout_set,
        models,
        wall_clock_seconds: None,
    })
}
