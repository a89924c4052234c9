//! Fuzzy graphs, fuzzy vertex pooling, and neuron-merging networks.

pub mod audit;
pub mod experiment;
pub mod graph;
pub mod nn;
pub mod pooling;
pub mod random;
mod par;

pub use par::is_parallel;
