use std::fmt;
use std::str::FromStr;

use super::{Dense, Network, NnError, Sample};

/// How two hidden neurons are fused into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeStrategy {
    /// Element-wise fuzzy min on incoming weights, bias, and outgoing weights
    /// (see [`signed_min`]).
    #[default]
    FuzzyMin,
    /// Mean of incoming weights and bias, sum of outgoing weights. Exactly
    /// preserves the network function when the two neurons are duplicates.
    Average,
}

impl MergeStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            MergeStrategy::FuzzyMin => "min",
            MergeStrategy::Average => "average",
        }
    }
}

impl fmt::Display for MergeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MergeStrategy {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" | "fuzzy-min" => Ok(MergeStrategy::FuzzyMin),
            "average" | "avg" | "mean" => Ok(MergeStrategy::Average),
            other => Err(NnError::InvalidConfig(format!("unknown merge strategy {other:?}"))),
        }
    }
}

/// One neuron merge performed by [`pooling_pass`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolEvent {
    pub epoch: usize,
    /// Neuron layer index (0 is the input layer).
    pub layer: usize,
    /// Neuron indices within the layer as it was when the pass started.
    pub i: usize,
    pub j: usize,
    pub similarity: f64,
    /// Layer size right after this merge.
    pub layer_size: usize,
}

/// Fuzzy min extended to signed reals: the operand of smaller magnitude,
/// keeping its sign. Ties return `a`. On `[0, 1]` this is the ordinary min.
pub fn signed_min(a: f64, b: f64) -> f64 {
    if b.abs() < a.abs() {
        b
    } else {
        a
    }
}

/// Cosine of the angle between `u` and `v`. A zero vector has similarity 0
/// with everything.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, NnError> {
    if u.len() != v.len() || u.is_empty() {
        return Err(NnError::LengthMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum();
    let nv: f64 = v.iter().map(|b| b * b).sum();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv).sqrt()).clamp(-1.0, 1.0))
}

/// Activation of every hidden neuron across the dataset:
/// `result[h][k][s]` is neuron `k` of hidden layer `h + 1` on sample `s`.
pub fn collect_activations(net: &Network, data: &[Sample]) -> Result<Vec<Vec<Vec<f64>>>, NnError> {
    if data.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    let sizes = net.layer_sizes();
    let hidden = &sizes[1..sizes.len() - 1];
    let mut out: Vec<Vec<Vec<f64>>> = hidden
        .iter()
        .map(|&n| vec![Vec::with_capacity(data.len()); n])
        .collect();
    for s in data {
        let acts = net.forward(&s.input)?;
        for (h, layer) in out.iter_mut().enumerate() {
            for (k, neuron) in layer.iter_mut().enumerate() {
                neuron.push(acts[h + 1][k]);
            }
        }
    }
    Ok(out)
}

/// Fuses neurons `i < j` of hidden layer `layer` into one neuron at position
/// `i`; neuron `j` is removed.
pub fn merge_neurons(
    net: &Network,
    layer: usize,
    i: usize,
    j: usize,
    strategy: MergeStrategy,
) -> Result<Network, NnError> {
    let sizes = net.layer_sizes();
    if layer == 0 || layer + 1 >= sizes.len() {
        return Err(NnError::NotHiddenLayer(layer));
    }
    let size = sizes[layer];
    if i >= j || j >= size {
        return Err(NnError::IndexOutOfRange(format!(
            "need i < j < {size}, got i = {i}, j = {j}"
        )));
    }
    let incoming = &net.layers()[layer - 1];
    let outgoing = &net.layers()[layer];

    let fused_row: Vec<f64>;
    let fused_bias: f64;
    let fused_col: Vec<f64>;
    let col = |m: &Dense, c: usize| -> Vec<f64> { (0..m.rows()).map(|r| m.weight(r, c)).collect() };
    match strategy {
        MergeStrategy::FuzzyMin => {
            fused_row = incoming
                .row(i)
                .iter()
                .zip(incoming.row(j))
                .map(|(&a, &b)| signed_min(a, b))
                .collect();
            fused_bias = signed_min(incoming.bias()[i], incoming.bias()[j]);
            fused_col = col(outgoing, i)
                .into_iter()
                .zip(col(outgoing, j))
                .map(|(a, b)| signed_min(a, b))
                .collect();
        }
        MergeStrategy::Average => {
            fused_row = incoming
                .row(i)
                .iter()
                .zip(incoming.row(j))
                .map(|(a, b)| (a + b) / 2.0)
                .collect();
            fused_bias = (incoming.bias()[i] + incoming.bias()[j]) / 2.0;
            fused_col = col(outgoing, i)
                .into_iter()
                .zip(col(outgoing, j))
                .map(|(a, b)| a + b)
                .collect();
        }
    }

    let mut in_w = Vec::with_capacity((size - 1) * incoming.cols());
    let mut in_b = Vec::with_capacity(size - 1);
    for r in (0..size).filter(|&r| r != j) {
        if r == i {
            in_w.extend_from_slice(&fused_row);
            in_b.push(fused_bias);
        } else {
            in_w.extend_from_slice(incoming.row(r));
            in_b.push(incoming.bias()[r]);
        }
    }
    let mut out_w = Vec::with_capacity(outgoing.rows() * (size - 1));
    for r in 0..outgoing.rows() {
        for c in (0..size).filter(|&c| c != j) {
            out_w.push(if c == i { fused_col[r] } else { outgoing.weight(r, c) });
        }
    }
    let new_in = Dense::from_parts(size - 1, incoming.cols(), in_w, in_b)?;
    let new_out = Dense::from_parts(outgoing.rows(), size - 1, out_w, outgoing.bias().to_vec())?;
    let mut merged = net.clone();
    merged.replace_layers(layer - 1, new_in, new_out);
    Ok(merged)
}

/// Merges hidden neurons whose activation vectors have cosine similarity
/// strictly above `tau`.
///
/// Similarities are computed once from the network as passed in. Within each
/// hidden layer, qualifying pairs are taken greedily by descending similarity
/// (ties by index), skipping any pair that reuses an already-merged neuron.
/// `epoch` is stamped on the returned events.
pub fn pooling_pass(
    net: &Network,
    data: &[Sample],
    tau: f64,
    strategy: MergeStrategy,
    epoch: usize,
) -> Result<(Network, Vec<PoolEvent>), NnError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(NnError::InvalidConfig(format!("threshold {tau} is outside (0, 1]")));
    }
    let activations = collect_activations(net, data)?;
    let mut result = net.clone();
    let mut events = Vec::new();
    for (h, neurons) in activations.iter().enumerate() {
        let layer = h + 1;
        let n = neurons.len();
        let mut candidates = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let s = cosine_similarity(&neurons[i], &neurons[j])?;
                if s > tau {
                    candidates.push((s, i, j));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

        let mut used = vec![false; n];
        // current position of each original neuron; None once removed
        let mut position: Vec<Option<usize>> = (0..n).map(Some).collect();
        for (s, i, j) in candidates {
            if used[i] || used[j] {
                continue;
            }
            let size = result.layer_sizes()[layer];
            if size <= 1 {
                break;
            }
            used[i] = true;
            used[j] = true;
            // removals keep relative order, so ci < cj still holds
            let (ci, cj) = (position[i].expect("live"), position[j].expect("live"));
            result = merge_neurons(&result, layer, ci, cj, strategy)?;
            for p in position.iter_mut() {
                match *p {
                    Some(c) if c == cj => *p = None,
                    Some(c) if c > cj => *p = Some(c - 1),
                    _ => {}
                }
            }
            events.push(PoolEvent {
                epoch,
                layer,
                i,
                j,
                similarity: s,
                layer_size: size - 1,
            });
        }
    }
    Ok((result, events))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_data() -> Vec<Sample> {
        (0..25)
            .map(|k| {
                let (a, b) = ((k % 5) as f64 / 4.0, (k / 5) as f64 / 4.0);
                Sample::new(vec![a, b], vec![1.0, 0.0])
            })
            .collect()
    }

    /// [2, 3, 2] net whose hidden neurons 0 and 2 are exact duplicates.
    fn net_with_duplicate() -> Network {
        let hidden = Dense::from_parts(
            3,
            2,
            vec![0.8, -0.4, 1.5, 2.0, 0.8, -0.4],
            vec![0.1, -0.7, 0.1],
        )
        .unwrap();
        let out = Dense::from_parts(2, 3, vec![0.3, -1.1, 0.3, 0.9, 0.2, 0.9], vec![0.05, -0.05]).unwrap();
        Network::from_layers(vec![hidden, out]).unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 0.0);
        let s = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(
            cosine_similarity(&[1.0], &[1.0, 2.0]),
            Err(NnError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn signed_min_keeps_smaller_magnitude() {
        let a = [0.5, -0.2];
        let b = [0.3, -0.9];
        let merged: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| signed_min(x, y)).collect();
        assert_eq!(merged, vec![0.3, -0.2]);
        assert_eq!(signed_min(0.4, -0.4), 0.4);
        assert_eq!(signed_min(0.2, 0.7), 0.2);
    }

    #[test]
    fn fuzzy_min_merge_updates_both_sides() {
        let hidden = Dense::from_parts(2, 2, vec![0.5, -0.2, 0.3, -0.9], vec![0.4, -0.1]).unwrap();
        let out = Dense::from_parts(1, 2, vec![-0.6, 0.2], vec![0.0]).unwrap();
        let net = Network::from_layers(vec![hidden, out]).unwrap();
        let merged = merge_neurons(&net, 1, 0, 1, MergeStrategy::FuzzyMin).unwrap();
        assert_eq!(merged.layer_sizes(), vec![2, 1, 1]);
        assert_eq!(merged.layers()[0].row(0), &[0.3, -0.2]);
        assert_eq!(merged.layers()[0].bias(), &[-0.1]);
        assert_eq!(merged.layers()[1].weights(), &[0.2]);
    }

    #[test]
    fn average_merge_of_duplicates_preserves_function() {
        let net = net_with_duplicate();
        let merged = merge_neurons(&net, 1, 0, 2, MergeStrategy::Average).unwrap();
        assert_eq!(merged.layer_sizes(), vec![2, 2, 2]);
        for s in grid_data() {
            let a = net.predict(&s.input).unwrap();
            let b = merged.predict(&s.input).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn merge_rejects_bad_targets() {
        let net = net_with_duplicate();
        assert_eq!(
            merge_neurons(&net, 2, 0, 1, MergeStrategy::FuzzyMin),
            Err(NnError::NotHiddenLayer(2))
        );
        assert_eq!(
            merge_neurons(&net, 0, 0, 1, MergeStrategy::FuzzyMin),
            Err(NnError::NotHiddenLayer(0))
        );
        assert!(matches!(
            merge_neurons(&net, 1, 1, 3, MergeStrategy::FuzzyMin),
            Err(NnError::IndexOutOfRange(_))
        ));
        assert!(matches!(
            merge_neurons(&net, 1, 2, 1, MergeStrategy::FuzzyMin),
            Err(NnError::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn activations_have_dataset_length() {
        let net = net_with_duplicate();
        let data = grid_data();
        let acts = collect_activations(&net, &data).unwrap();
        assert_eq!(acts.len(), 1);
        assert_eq!(acts[0].len(), 3);
        assert!(acts[0].iter().all(|v| v.len() == data.len()));
        assert_eq!(acts[0][0], acts[0][2]);
        assert_eq!(cosine_similarity(&acts[0][0], &acts[0][2]).unwrap(), 1.0);
        assert_eq!(collect_activations(&net, &[]), Err(NnError::EmptyDataset));
    }

    #[test]
    fn zero_network_activations_are_half() {
        let net = Network::from_layers(vec![Dense::zeros(4, 2), Dense::zeros(2, 4)]).unwrap();
        let acts = collect_activations(&net, &grid_data()).unwrap();
        assert!(acts[0].iter().flatten().all(|&a| a == 0.5));
    }

    #[test]
    fn duplicate_neurons_merge_once() {
        let net = net_with_duplicate();
        let (merged, events) = pooling_pass(&net, &grid_data(), 0.99, MergeStrategy::Average, 7).unwrap();
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert_eq!((e.epoch, e.layer, e.i, e.j, e.layer_size), (7, 1, 0, 2, 2));
        assert_eq!(e.similarity, 1.0);
        assert_eq!(merged.layer_sizes(), vec![2, 2, 2]);
    }

    #[test]
    fn tau_one_never_merges_distinct_neurons() {
        let net = Network::init(&[2, 8, 8, 2], 3).unwrap();
        let (after, events) = pooling_pass(&net, &grid_data(), 1.0, MergeStrategy::FuzzyMin, 0).unwrap();
        assert!(events.is_empty());
        assert_eq!(after, net);
    }

    #[test]
    fn three_similar_neurons_merge_one_pair_per_pass() {
        // rows are positive multiples of each other, so activations are all
        // close to parallel but not identical
        let hidden = Dense::from_parts(
            3,
            2,
            vec![1.0, 1.0, 1.1, 1.1, 1.2, 1.2],
            vec![0.0, 0.0, 0.0],
        )
        .unwrap();
        let out = Dense::from_parts(1, 3, vec![0.5, 0.5, 0.5], vec![0.0]).unwrap();
        let net = Network::from_layers(vec![hidden, out]).unwrap();
        let (after, events) = pooling_pass(&net, &grid_data(), 0.9, MergeStrategy::FuzzyMin, 0).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(after.layer_sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn disjoint_pairs_all_merge_with_shifted_indices() {
        // neurons 0/3 and 1/2 are duplicates
        let hidden = Dense::from_parts(
            4,
            2,
            vec![1.0, -2.0, 3.0, 0.5, 3.0, 0.5, 1.0, -2.0],
            vec![0.2, -0.3, -0.3, 0.2],
        )
        .unwrap();
        let out = Dense::from_parts(1, 4, vec![0.1, 0.2, 0.3, 0.4], vec![0.0]).unwrap();
        let net = Network::from_layers(vec![hidden, out]).unwrap();
        let (after, events) = pooling_pass(&net, &grid_data(), 0.999, MergeStrategy::Average, 0).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(after.layer_sizes(), vec![2, 2, 1]);
        assert_eq!(after.layers()[0].row(0), &[1.0, -2.0]);
        assert_eq!(after.layers()[0].row(1), &[3.0, 0.5]);
        let w = after.layers()[1].weights();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_tau_is_rejected() {
        let net = net_with_duplicate();
        assert!(pooling_pass(&net, &grid_data(), 0.0, MergeStrategy::FuzzyMin, 0).is_err());
        assert!(pooling_pass(&net, &grid_data(), 1.5, MergeStrategy::FuzzyMin, 0).is_err());
    }
}
