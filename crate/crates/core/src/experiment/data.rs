use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ExperimentError;
use crate::nn::Sample;

const TABLE1: &str = include_str!("../../data/table1.txt");
const TABLE2: &str = include_str!("../../data/table2.txt");

/// Seed for the points that top the hand-listed set up to 100.
const TOP_UP_SEED: u64 = 0x5eed_0001;

/// Class rule: 1 when the coordinates sum to at least 1.
pub fn label_for(x1: f64, x2: f64) -> u8 {
    u8::from(x1 + x2 >= 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Taken from the hand-listed table.
    Table,
    /// Drawn by a seeded generator.
    Generated,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Table => "table",
            Origin::Generated => "generated",
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Origin::Table),
            "generated" => Ok(Origin::Generated),
            other => Err(format!("unknown origin {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
    pub label: u8,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Point>,
}

impl Dataset {
    /// Labels every point by [`label_for`]. Coordinates must lie in `[0, 1]`.
    pub fn new(points: impl IntoIterator<Item = (f64, f64, Origin)>) -> Result<Self, ExperimentError> {
        let points = points
            .into_iter()
            .map(|(x1, x2, origin)| {
                for x in [x1, x2] {
                    if !(0.0..=1.0).contains(&x) {
                        return Err(ExperimentError::Data(format!("coordinate {x} outside [0, 1]")));
                    }
                }
                Ok(Point {
                    x1,
                    x2,
                    label: label_for(x1, x2),
                    origin,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Dataset { points })
    }

    /// Accepts points with their labels, rejecting any that break the rule.
    pub fn from_labeled(points: Vec<Point>) -> Result<Self, ExperimentError> {
        if let Some(p) = points.iter().find(|p| p.label != label_for(p.x1, p.x2)) {
            return Err(ExperimentError::Data(format!(
                "point ({}, {}) labelled {} breaks the sum rule",
                p.x1, p.x2, p.label
            )));
        }
        let checked = Dataset::new(points.iter().map(|p| (p.x1, p.x2, p.origin)))?;
        Ok(checked)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.points.iter().filter(|p| p.label == 1).count();
        [self.len() - ones, ones]
    }

    /// One-hot targets: class 0 is `(1, 0)`, class 1 is `(0, 1)`.
    pub fn to_samples(&self) -> Vec<Sample> {
        self.points
            .iter()
            .map(|p| {
                let target = if p.label == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
                Sample::new(vec![p.x1, p.x2], target)
            })
            .collect()
    }

    /// Deterministic shuffle, then the last `fraction` of points go to the
    /// held-out set (at least one point stays in each part).
    pub fn split_holdout(&self, fraction: f64, seed: u64) -> Result<(Dataset, Dataset), ExperimentError> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(ExperimentError::InvalidConfig(format!(
                "holdout fraction must lie in (0, 1), got {fraction}"
            )));
        }
        if self.len() < 2 {
            return Err(ExperimentError::Data("need at least two points to hold some out".into()));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x4_01d0_u64));
        let held = ((self.len() as f64 * fraction).round() as usize).clamp(1, self.len() - 1);
        let cut = self.len() - held;
        let pick = |idx: &[usize]| Dataset {
            points: idx.iter().map(|&i| self.points[i]).collect(),
        };
        Ok((pick(&order[..cut]), pick(&order[cut..])))
    }
}

/// Parses `x1 x2` lines; `#` comments and blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, ExperimentError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| ExperimentError::Parse {
            what: "points".into(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields.as_slice() else {
            return Err(bad(format!("expected two numbers, got {line:?}")));
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(format!("{t:?} is not a number")));
        out.push((num(a)?, num(b)?));
    }
    Ok(out)
}

/// The 66 hand-listed points.
pub fn table1_points() -> Vec<(f64, f64)> {
    parse_points(TABLE1).expect("bundled table parses")
}

/// The 30 listed sample points of the larger dataset (a fixture only).
pub fn table2_points() -> Vec<(f64, f64)> {
    parse_points(TABLE2).expect("bundled table parses")
}

/// The 100-point dataset: the 66 hand-listed points plus 34 seeded points
/// from the sum < 1 region, which balances the classes at 50 each.
pub fn dataset1() -> Dataset {
    let table = table1_points();
    let mut rng = ChaCha8Rng::seed_from_u64(TOP_UP_SEED);
    let mut extra = Vec::new();
    while table.len() + extra.len() < 100 {
        let (x1, x2): (f64, f64) = (rng.gen(), rng.gen());
        if label_for(x1, x2) == 0 {
            extra.push((x1, x2));
        }
    }
    Dataset::new(
        table
            .into_iter()
            .map(|(a, b)| (a, b, Origin::Table))
            .chain(extra.into_iter().map(|(a, b)| (a, b, Origin::Generated))),
    )
    .expect("points lie in the unit square")
}

/// `n` uniform points in `[0, 1)^2`.
pub fn dataset2(seed: u64, n: usize) -> Result<Dataset, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::InvalidConfig("dataset size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Dataset::new((0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>(), Origin::Generated)))
}

/// Which dataset an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetSpec {
    One,
    Two { seed: u64, n: usize },
}

impl DatasetSpec {
    pub fn build(self) -> Result<Dataset, ExperimentError> {
        match self {
            DatasetSpec::One => Ok(dataset1()),
            DatasetSpec::Two { seed, n } => dataset2(seed, n),
        }
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSpec::One => write!(f, "1"),
            DatasetSpec::Two { seed, n } => write!(f, "2 seed={seed} n={n}"),
        }
    }
}

impl FromStr for DatasetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let field = |t: &str, key: &str| -> Result<u64, String> {
            t.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| format!("bad dataset field {t:?}"))
        };
        match tokens.as_slice() {
            ["1"] => Ok(DatasetSpec::One),
            ["2", seed, n] => Ok(DatasetSpec::Two {
                seed: field(seed, "seed=")?,
                n: field(n, "n=")? as usize,
            }),
            _ => Err(format!("bad dataset description {s:?}")),
        }
    }
}
