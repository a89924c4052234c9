use super::data::Dataset;
use crate::nn::{Network, NnError};

/// Index of the larger output; ties go to class 0.
pub fn predict_class(net: &Network, x1: f64, x2: f64) -> Result<u8, NnError> {
    let out = net.predict(&[x1, x2])?;
    if out.len() != 2 {
        return Err(NnError::ShapeMismatch {
            expected: 2,
            got: out.len(),
        });
    }
    Ok(u8::from(out[1] > out[0]))
}

/// `counts[actual][predicted]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.counts[0][1] == 0 && self.counts[1][0] == 0
    }
}

pub fn confusion(net: &Network, data: &Dataset) -> Result<ConfusionMatrix, NnError> {
    let mut m = ConfusionMatrix::default();
    for p in data.points() {
        let predicted = predict_class(net, p.x1, p.x2)?;
        m.counts[p.label as usize][predicted as usize] += 1;
    }
    Ok(m)
}

/// Predicted labels on a `resolution × resolution` grid over the unit
/// square. Cell `(i, j)` is centred at `((i + 0.5) / r, (j + 0.5) / r)` and
/// stored at `j * r + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionGrid {
    pub resolution: usize,
    pub cells: Vec<u8>,
}

impl DecisionGrid {
    pub fn center(resolution: usize, i: usize, j: usize) -> (f64, f64) {
        let r = resolution as f64;
        ((i as f64 + 0.5) / r, (j as f64 + 0.5) / r)
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[j * self.resolution + i]
    }
}

pub fn decision_grid(net: &Network, resolution: usize) -> Result<DecisionGrid, NnError> {
    if resolution == 0 {
        return Err(NnError::InvalidConfig("grid resolution must be at least 1".into()));
    }
    let mut cells = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            let (x1, x2) = DecisionGrid::center(resolution, i, j);
            cells.push(predict_class(net, x1, x2)?);
        }
    }
    Ok(DecisionGrid { resolution, cells })
}
