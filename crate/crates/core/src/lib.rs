//! Adaptive pooled-testing simulation over community-structured populations.
//!
//! The library samples infections from a two-stage block infection model
//! (seed selection, then one round of transmission), identifies the infected
//! set against a noiseless pooled-test oracle with two adaptive algorithms
//! (order-oblivious binary splitting and a community-aware two-phase
//! scheme), and evaluates closed-form upper bounds, Monte-Carlo entropy
//! lower bounds, and parameter-regime classifications for the expected test
//! counts.
//!
//! Modules:
//! - [`stats`]: deterministic stream RNG, binary entropy, binomial sampling,
//!   summary statistics.
//! - [`graph`]: community partitions, stochastic block graphs, disjoint
//!   cliques, edge-list serialization.
//! - [`infection`]: the infection samplers and closed-form marginals.
//! - [`algorithms`]: the pooled-test oracle and both identification
//!   algorithms with exact test accounting.
//! - [`bounds`]: upper/lower bounds, order expressions, regime classifier.
//! - [`experiment`]: reproducible parameter sweeps and CSV emission.

pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod infection;
pub mod stats;

pub use error::{Error, Result};
