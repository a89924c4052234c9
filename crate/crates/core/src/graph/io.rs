//! Line-based text format:
//!
//! ```text
//! # comment
//! v <id> <sigma>
//! e <id1> <id2> <mu>
//! ```
//!
//! Vertices must be declared before the edges that use them. Serialization
//! is canonical (vertices by id, edges by sorted endpoint pair) and writes
//! memberships with the shortest decimal that parses back to the same `f64`.

use std::fmt::Write;

use super::{FuzzyGraph, GraphError, VertexId};

fn at_line(line: usize) -> impl Fn(GraphError) -> GraphError {
    move |e| GraphError::AtLine {
        line,
        source: Box::new(e),
    }
}

fn parse_membership(token: &str, line: usize) -> Result<f64, GraphError> {
    token.parse::<f64>().map_err(|_| GraphError::Syntax {
        line,
        message: format!("{token:?} is not a decimal membership value"),
    })
}

pub fn parse_graph(text: &str) -> Result<FuzzyGraph, GraphError> {
    let mut g = FuzzyGraph::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.as_slice() {
            ["v", id, sigma] => {
                let sigma = parse_membership(sigma, line)?;
                let id = VertexId::new(*id).map_err(at_line(line))?;
                g.insert_vertex(id, sigma).map_err(at_line(line))?;
            }
            ["e", p, q, mu] => {
                let mu = parse_membership(mu, line)?;
                g.insert_edge(p, q, mu).map_err(at_line(line))?;
            }
            _ => {
                return Err(GraphError::Syntax {
                    line,
                    message: format!("expected `v <id> <sigma>` or `e <id> <id> <mu>`, got {trimmed:?}"),
                })
            }
        }
    }
    Ok(g)
}

pub fn serialize_graph(g: &FuzzyGraph) -> String {
    let mut out = String::new();
    for (id, sigma) in g.vertices() {
        writeln!(out, "v {id} {sigma}").expect("write to string");
    }
    for (p, q, mu) in g.edges() {
        writeln!(out, "e {p} {q} {mu}").expect("write to string");
    }
    out
}
