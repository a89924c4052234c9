use std::fmt::Write;

use super::{Dense, Network, NnError};
use crate::graph::{FuzzyGraph, VertexId};

/// Fuzzy-graph view of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    pub graph: FuzzyGraph,
    /// Weight matrices (by index into `Network::layers`) that were all zero
    /// and therefore contributed no edges.
    pub degenerate_layers: Vec<usize>,
}

fn neuron_id(layer: usize, index: usize) -> VertexId {
    VertexId::new(format!("l{layer}n{index}")).expect("generated ids contain no whitespace")
}

/// One vertex per neuron (`l<layer>n<index>`, membership 1) and one edge per
/// nonzero weight, with membership `|w| / max |w|` over its weight matrix.
pub fn net_to_fuzzy_graph(net: &Network) -> NetworkGraph {
    let mut graph = FuzzyGraph::new();
    for (layer, &size) in net.layer_sizes().iter().enumerate() {
        for k in 0..size {
            graph
                .insert_vertex(neuron_id(layer, k), 1.0)
                .expect("fresh neuron ids");
        }
    }
    let mut degenerate_layers = Vec::new();
    for (l, dense) in net.layers().iter().enumerate() {
        let max = dense.weights().iter().fold(0.0f64, |m, w| m.max(w.abs()));
        if max == 0.0 {
            degenerate_layers.push(l);
            continue;
        }
        for r in 0..dense.rows() {
            for c in 0..dense.cols() {
                let w = dense.weight(r, c);
                if w != 0.0 {
                    let mu = (w.abs() / max).min(1.0);
                    graph
                        .insert_edge(neuron_id(l, c).as_str(), neuron_id(l + 1, r).as_str(), mu)
                        .expect("memberships lie in (0, 1]");
                }
            }
        }
    }
    NetworkGraph {
        graph,
        degenerate_layers,
    }
}

/// Raw weight sidecar: for each weight matrix, `layer <l> <rows> <cols>`
/// followed by one line per row, then `bias <l>` and the bias values.
pub fn serialize_weights(net: &Network) -> String {
    let mut out = String::new();
    let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
    for (l, dense) in net.layers().iter().enumerate() {
        writeln!(out, "layer {l} {} {}", dense.rows(), dense.cols()).expect("string write");
        for r in 0..dense.rows() {
            writeln!(out, "{}", join(dense.row(r))).expect("string write");
        }
        writeln!(out, "bias {l}").expect("string write");
        writeln!(out, "{}", join(dense.bias())).expect("string write");
    }
    out
}

pub fn parse_weights(text: &str) -> Result<Network, NnError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let err = |line: usize, message: String| NnError::Parse { line, message };
    let mut layers = Vec::new();

    // reads whitespace-separated numbers until `count` are collected
    let numbers = |count: usize,
                       lines: &mut std::iter::Peekable<_>|
     -> Result<Vec<f64>, NnError> {
        let mut values = Vec::with_capacity(count);
        while values.len() < count {
            let Some((line, text)): Option<(usize, &str)> = lines.next() else {
                return Err(err(0, format!("expected {count} values, found {}", values.len())));
            };
            for tok in text.split_whitespace() {
                let v = tok
                    .parse::<f64>()
                    .map_err(|_| err(line, format!("{tok:?} is not a number")))?;
                values.push(v);
            }
            if values.len() > count {
                return Err(err(line, format!("expected {count} values, found {}", values.len())));
            }
        }
        Ok(values)
    };

    while let Some((line, header)) = lines.next() {
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let parse_usize = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| err(line, format!("{t:?} is not a non-negative integer")))
        };
        let (l, rows, cols) = match tokens.as_slice() {
            ["layer", l, r, c] => (parse_usize(l)?, parse_usize(r)?, parse_usize(c)?),
            _ => return Err(err(line, format!("expected `layer <l> <rows> <cols>`, got {header:?}"))),
        };
        if l != layers.len() {
            return Err(err(line, format!("expected layer {}, got {l}", layers.len())));
        }
        let weights = numbers(rows * cols, &mut lines)?;
        match lines.next() {
            Some((_, b)) if b.split_whitespace().collect::<Vec<_>>() == ["bias", &l.to_string()] => {}
            Some((bl, b)) => return Err(err(bl, format!("expected `bias {l}`, got {b:?}"))),
            None => return Err(err(line, format!("missing `bias {l}` section"))),
        }
        let bias = numbers(rows, &mut lines)?;
        layers.push(Dense::from_parts(rows, cols, weights, bias)?);
    }
    Network::from_layers(layers)
}
