//! Dense sigmoid feedforward networks trained by full-batch gradient descent,
//! plus the neuron-merging pass that shrinks hidden layers during training.

mod export;
mod merge;
mod train;

pub use export::{net_to_fuzzy_graph, parse_weights, serialize_weights, NetworkGraph};
pub use merge::{
    collect_activations, cosine_similarity, merge_neurons, pooling_pass, signed_min,
    MergeStrategy, PoolEvent,
};
pub use train::{train, EpochLog, TrainConfig, TrainOutcome};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::par;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("bad architecture: {0}")]
    BadArchitecture(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("neuron index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("layer {0} is not a hidden layer")]
    NotHiddenLayer(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One fully connected layer. `weights` is row-major with one row per output
/// neuron, so row `i` holds the incoming weights of neuron `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    pub fn from_parts(
        rows: usize,
        cols: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, NnError> {
        if weights.len() != rows * cols {
            return Err(NnError::ShapeMismatch {
                expected: rows * cols,
                got: weights.len(),
            });
        }
        if bias.len() != rows {
            return Err(NnError::ShapeMismatch {
                expected: rows,
                got: bias.len(),
            });
        }
        Ok(Dense {
            rows,
            cols,
            weights,
            bias,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    pub fn set_weight(&mut self, row: usize, col: usize, value: f64) {
        self.weights[row * self.cols + col] = value;
    }

    pub fn set_bias(&mut self, row: usize, value: f64) {
        self.bias[row] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.weights[row * self.cols..(row + 1) * self.cols]
    }

    fn apply(&self, input: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let z: f64 = self
                .row(r)
                .iter()
                .zip(input)
                .map(|(w, a)| w * a)
                .sum::<f64>()
                + self.bias[r];
            *o = sigmoid(z);
        }
    }

    fn axpy(&mut self, scale: f64, other: &Dense) {
        for (w, g) in self.weights.iter_mut().zip(&other.weights) {
            *w += scale * g;
        }
        for (b, g) in self.bias.iter_mut().zip(&other.bias) {
            *b += scale * g;
        }
    }

    fn add_assign(&mut self, other: &Dense) {
        self.axpy(1.0, other);
    }

    fn fill_zero(&mut self) {
        self.weights.iter_mut().for_each(|w| *w = 0.0);
        self.bias.iter_mut().for_each(|b| *b = 0.0);
    }
}

/// A training example: network input and the desired output vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl Sample {
    pub fn new(input: Vec<f64>, target: Vec<f64>) -> Self {
        Sample { input, target }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Dense>,
}

/// Gradient of the loss with the same shape as the network parameters.
pub type Gradient = Vec<Dense>;

impl Network {
    /// Glorot-uniform weights, zero biases. The same seed always yields the
    /// same network.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self, NnError> {
        if layer_sizes.len() < 2 {
            return Err(NnError::BadArchitecture(format!(
                "need at least an input and an output layer, got {} layer(s)",
                layer_sizes.len()
            )));
        }
        if let Some(pos) = layer_sizes.iter().position(|&s| s == 0) {
            return Err(NnError::BadArchitecture(format!("layer {pos} has size 0")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_sizes
            .windows(2)
            .map(|pair| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let dist = Uniform::new_inclusive(-bound, bound);
                let weights = (0..fan_in * fan_out).map(|_| dist.sample(&mut rng)).collect();
                Dense {
                    rows: fan_out,
                    cols: fan_in,
                    weights,
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Network { layers })
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::BadArchitecture("no layers".into()));
        }
        for pair in layers.windows(2) {
            if pair[1].cols != pair[0].rows {
                return Err(NnError::ShapeMismatch {
                    expected: pair[0].rows,
                    got: pair[1].cols,
                });
            }
        }
        if layers.iter().any(|l| l.rows == 0 || l.cols == 0) {
            return Err(NnError::BadArchitecture("empty layer".into()));
        }
        Ok(Network { layers })
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].cols)
            .chain(self.layers.iter().map(|l| l.rows))
            .collect()
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_size(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    /// Weight matrices; entry `l` connects neuron layer `l` to layer `l + 1`.
    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub(crate) fn replace_layers(&mut self, at: usize, incoming: Dense, outgoing: Dense) {
        self.layers[at] = incoming;
        self.layers[at + 1] = outgoing;
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Activations of every layer, input layer included.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, NnError> {
        if x.len() != self.input_size() {
            return Err(NnError::ShapeMismatch {
                expected: self.input_size(),
                got: x.len(),
            });
        }
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let mut out = vec![0.0; layer.rows];
            layer.apply(acts.last().expect("non-empty"), &mut out);
            acts.push(out);
        }
        Ok(acts)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        Ok(self.forward(x)?.pop().expect("output layer"))
    }

    fn check_samples(&self, data: &[Sample]) -> Result<(), NnError> {
        if data.is_empty() {
            return Err(NnError::EmptyDataset);
        }
        for s in data {
            if s.input.len() != self.input_size() {
                return Err(NnError::ShapeMismatch {
                    expected: self.input_size(),
                    got: s.input.len(),
                });
            }
            if s.target.len() != self.output_size() {
                return Err(NnError::ShapeMismatch {
                    expected: self.output_size(),
                    got: s.target.len(),
                });
            }
        }
        Ok(())
    }

    /// Mean squared error over samples and output units.
    pub fn loss(&self, data: &[Sample]) -> Result<f64, NnError> {
        self.check_samples(data)?;
        let mut ws = Workspace::new(self);
        let total: f64 = data
            .iter()
            .map(|s| {
                ws.forward(self, &s.input);
                squared_error(ws.output(), &s.target)
            })
            .sum();
        Ok(total / (data.len() * self.output_size()) as f64)
    }

    /// Loss and its exact gradient with respect to every weight and bias.
    ///
    /// Samples are processed in fixed-size chunks whose partial sums are
    /// added in chunk order, so the result does not depend on whether the
    /// chunks ran in parallel.
    pub fn loss_and_gradient(&self, data: &[Sample]) -> Result<(f64, Gradient), NnError> {
        self.check_samples(data)?;
        let chunks: Vec<&[Sample]> = data.chunks(GRADIENT_CHUNK).collect();
        let partials = par::map_collect(chunks, |chunk| {
            let mut ws = Workspace::new(self);
            let mut grad = self.zero_gradient();
            let mut sse = 0.0;
            for s in chunk {
                sse += ws.accumulate(self, s, &mut grad);
            }
            (sse, grad)
        });
        let scale = 1.0 / (data.len() * self.output_size()) as f64;
        let mut iter = partials.into_iter();
        let (mut sse, mut grad) = iter.next().expect("non-empty dataset");
        for (s, g) in iter {
            sse += s;
            for (acc, part) in grad.iter_mut().zip(&g) {
                acc.add_assign(part);
            }
        }
        for layer in &mut grad {
            layer.weights.iter_mut().for_each(|w| *w *= scale);
            layer.bias.iter_mut().for_each(|b| *b *= scale);
        }
        Ok((sse * scale, grad))
    }

    fn zero_gradient(&self) -> Gradient {
        self.layers
            .iter()
            .map(|l| {
                let mut z = l.clone();
                z.fill_zero();
                z
            })
            .collect()
    }

    /// One full-batch gradient step on the summed squared error. Returns the
    /// loss measured before the step.
    ///
    /// The step direction is the gradient of the mean loss rescaled by
    /// `samples * outputs`, i.e. the gradient of the total squared error.
    pub fn train_epoch(&mut self, data: &[Sample], learning_rate: f64) -> Result<f64, NnError> {
        let (loss, grad) = self.loss_and_gradient(data)?;
        let step = -learning_rate * (data.len() * self.output_size()) as f64;
        for (layer, g) in self.layers.iter_mut().zip(&grad) {
            layer.axpy(step, g);
        }
        Ok(loss)
    }
}

const GRADIENT_CHUNK: usize = 64;

fn squared_error(out: &[f64], target: &[f64]) -> f64 {
    out.iter().zip(target).map(|(o, t)| (t - o) * (t - o)).sum()
}

/// Reusable per-thread buffers for forward and backward passes.
struct Workspace {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(net: &Network) -> Self {
        let sizes = net.layer_sizes();
        Workspace {
            acts: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            deltas: sizes[1..].iter().map(|&s| vec![0.0; s]).collect(),
        }
    }

    fn forward(&mut self, net: &Network, x: &[f64]) {
        self.acts[0].copy_from_slice(x);
        for (l, layer) in net.layers.iter().enumerate() {
            let (head, tail) = self.acts.split_at_mut(l + 1);
            layer.apply(&head[l], &mut tail[0]);
        }
    }

    fn output(&self) -> &[f64] {
        self.acts.last().expect("output layer")
    }

    /// Adds this sample's gradient of the squared error (unnormalized) into
    /// `grad`; returns the sample's squared error.
    fn accumulate(&mut self, net: &Network, s: &Sample, grad: &mut Gradient) -> f64 {
        self.forward(net, &s.input);
        let depth = net.layers.len();
        let out = &self.acts[depth];
        let mut sse = 0.0;
        for (k, d) in self.deltas[depth - 1].iter_mut().enumerate() {
            let diff = out[k] - s.target[k];
            sse += diff * diff;
            *d = 2.0 * diff * out[k] * (1.0 - out[k]);
        }
        for l in (0..depth).rev() {
            let layer = &net.layers[l];
            let input = &self.acts[l];
            let g = &mut grad[l];
            for r in 0..layer.rows {
                let d = self.deltas[l][r];
                g.bias[r] += d;
                let row = &mut g.weights[r * layer.cols..(r + 1) * layer.cols];
                for (gw, a) in row.iter_mut().zip(input) {
                    *gw += d * a;
                }
            }
            if l > 0 {
                let (lower, upper) = self.deltas.split_at_mut(l);
                let prev = &mut lower[l - 1];
                let act = &self.acts[l];
                for (c, p) in prev.iter_mut().enumerate() {
                    let back: f64 = (0..layer.rows)
                        .map(|r| layer.weights[r * layer.cols + c] * upper[0][r])
                        .sum();
                    *p = back * act[c] * (1.0 - act[c]);
                }
            }
        }
        sse
    }
}
