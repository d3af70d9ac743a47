//! Two-stage infection sampling (seed selection, then one round of neighbor
//! infection) on explicit graphs and directly under the block infection
//! model, plus the closed-form marginal probabilities.

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph};
use crate::stats::{pow1m, RngStream};

/// Parameters of the block infection model over n individuals in n/k
/// communities of size k: seed probability p, within-community transmission
/// q1, cross-community transmission q2 (q2 ≤ q1).
#[derive(Debug, Clone, PartialEq)]
pub struct SbimParams {
    n: usize,
    k: usize,
    p: f64,
    q1: f64,
    q2: f64,
}

impl SbimParams {
    pub fn new(n: usize, k: usize, p: f64, q1: f64, q2: f64) -> Result<Self> {
        if n == 0 || k == 0 || !n.is_multiple_of(k) {
            return Err(Error::Domain(format!(
                "sbim params: k = {k} must be positive and divide n = {n}"
            )));
        }
        for (name, v) in [("p", p), ("q1", q1), ("q2", q2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "sbim params: {name} = {v} outside [0, 1]"
                )));
            }
        }
        if q2 > q1 {
            return Err(Error::Domain(format!(
                "sbim params: cross-community q2 = {q2} exceeds within-community q1 = {q1}"
            )));
        }
        Ok(SbimParams { n, k, p, q1, q2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of communities, n/k.
    pub fn m(&self) -> usize {
        self.n / self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }
}

/// Seed indicators Y and infection statuses X over the population.
/// Seeds are always infected: Y ≤ X elementwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionState {
    seeds: Vec<bool>,
    statuses: Vec<bool>,
}

impl InfectionState {
    fn new(seeds: Vec<bool>, statuses: Vec<bool>) -> Self {
        debug_assert_eq!(seeds.len(), statuses.len());
        debug_assert!(seeds.iter().zip(&statuses).all(|(&y, &x)| !y || x));
        InfectionState { seeds, statuses }
    }

    pub fn n(&self) -> usize {
        self.statuses.len()
    }

    pub fn seeds(&self) -> &[bool] {
        &self.seeds
    }

    pub fn statuses(&self) -> &[bool] {
        &self.statuses
    }

    pub fn infected_count(&self) -> usize {
        self.statuses.iter().filter(|&&x| x).count()
    }

    /// Fixture format: a seeds line then a statuses line, '0'/'1' per vertex.
    pub fn to_bit_lines(&self) -> String {
        let line = |bits: &[bool]| {
            bits.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        };
        format!("{}\n{}\n", line(&self.seeds), line(&self.statuses))
    }

    pub fn from_bit_lines(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let parse = |line: Option<&str>, what: &str| -> Result<Vec<bool>> {
            let line =
                line.ok_or_else(|| Error::Parse(format!("bit lines: missing {what} line")))?;
            line.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::Parse(format!("bit lines: bad character {other:?}"))),
                })
                .collect()
        };
        let seeds = parse(lines.next(), "seeds")?;
        let statuses = parse(lines.next(), "statuses")?;
        if seeds.len() != statuses.len() {
            return Err(Error::Parse(format!(
                "bit lines: seeds length {} != statuses length {}",
                seeds.len(),
                statuses.len()
            )));
        }
        if seeds.iter().zip(&statuses).any(|(&y, &x)| y && !x) {
            return Err(Error::Parse(
                "bit lines: a seed is marked uninfected".into(),
            ));
        }
        Ok(InfectionState { seeds, statuses })
    }
}

/// Per-community OR of infection statuses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityStatus(Vec<bool>);

impl CommunityStatus {
    pub fn statuses(&self) -> &[bool] {
        &self.0
    }

    pub fn positive_count(&self) -> usize {
        self.0.iter().filter(|&&x| x).count()
    }
}

/// Samples the two-stage model on an explicit graph: each vertex seeds
/// independently with probability p, then every seed infects each of its
/// neighbors independently with probability q. Both stages run exactly once.
pub fn spread_on_graph(g: &Graph, p: f64, q: f64, rng: &mut RngStream) -> Result<InfectionState> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "spread_on_graph: {name} = {v} outside [0, 1]"
            )));
        }
    }
    let n = g.n();
    let seeds: Vec<bool> = (0..n).map(|_| rng.bernoulli(p)).collect();
    let mut statuses = seeds.clone();
    for (v, _) in seeds.iter().enumerate().filter(|(_, &is_seed)| is_seed) {
        for &u in g.neighbors(v) {
            // Transmission onto an already-infected vertex is a no-op, but
            // the coin is still spent: every (seed, neighbor) pair flips one.
            if rng.bernoulli(q) {
                statuses[u as usize] = true;
            }
        }
    }
    Ok(InfectionState::new(seeds, statuses))
}

/// Samples the block infection model directly, without materializing a graph.
///
/// Conditioned on the seed set, the non-seed statuses are independent coins:
/// a non-seed in a community holding z_in seeds (with z_out seeds elsewhere)
/// is infected with probability 1 − (1−q1)^z_in · (1−q2)^z_out. Collapsing
/// the per-seed transmissions into that single coin leaves the distribution
/// unchanged and keeps each sample O(n).
pub fn sample_sbim(
    params: &SbimParams,
    partition: &CommunityPartition,
    rng: &mut RngStream,
) -> Result<InfectionState> {
    check_partition(params, partition)?;
    let seeds: Vec<bool> = (0..params.n).map(|_| rng.bernoulli(params.p)).collect();
    let statuses = infect_from_seeds(params, partition, &seeds, rng);
    Ok(InfectionState::new(seeds, statuses))
}

/// Stage 2 alone, for a fixed seed vector.
pub(crate) fn infect_from_seeds(
    params: &SbimParams,
    partition: &CommunityPartition,
    seeds: &[bool],
    rng: &mut RngStream,
) -> Vec<bool> {
    let m = params.m();
    let mut community_seeds = vec![0u64; m];
    let mut total_seeds = 0u64;
    for (v, &is_seed) in seeds.iter().enumerate() {
        if is_seed {
            community_seeds[partition.community_of(v) as usize] += 1;
            total_seeds += 1;
        }
    }
    let infect_prob: Vec<f64> = community_seeds
        .iter()
        .map(|&z_in| {
            let z_out = total_seeds - z_in;
            1.0 - pow1m(params.q1, z_in as f64) * pow1m(params.q2, z_out as f64)
        })
        .collect();
    seeds
        .iter()
        .enumerate()
        .map(|(v, &is_seed)| {
            is_seed || rng.bernoulli(infect_prob[partition.community_of(v) as usize])
        })
        .collect()
}

fn check_partition(params: &SbimParams, partition: &CommunityPartition) -> Result<()> {
    if partition.n() != params.n || partition.k() != params.k {
        return Err(Error::Domain(format!(
            "partition ({}, {}) inconsistent with params ({}, {})",
            partition.n(),
            partition.k(),
            params.n,
            params.k
        )));
    }
    Ok(())
}

/// Marginal infection probability of a degree-d vertex on an arbitrary graph:
/// 1 − (1−p)·(1−p·q)^d.
pub fn marginal_general(p: f64, q: f64, d: usize) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "marginal_general: {name} = {v} outside [0, 1]"
            )));
        }
    }
    Ok(1.0 - (1.0 - p) * pow1m(p * q, d as f64))
}

/// Marginal infection probability of any vertex under the block model:
/// 1 − (1−p)·(1−p·q1)^(k−1)·(1−p·q2)^(n−k).
pub fn marginal_sbim(params: &SbimParams) -> f64 {
    1.0 - (1.0 - params.p)
        * pow1m(params.p * params.q1, (params.k - 1) as f64)
        * pow1m(params.p * params.q2, (params.n - params.k) as f64)
}

/// Probability that a community holds at least one infected member:
/// 1 − (1−p)^k · (1 − p·(1−(1−q2)^k))^(n−k).
pub fn community_marginal(params: &SbimParams) -> f64 {
    let reach_in = params.p * (1.0 - pow1m(params.q2, params.k as f64));
    1.0 - pow1m(params.p, params.k as f64) * pow1m(reach_in, (params.n - params.k) as f64)
}

/// Per-community OR of statuses.
pub fn community_status(
    state: &InfectionState,
    partition: &CommunityPartition,
) -> Result<CommunityStatus> {
    if state.n() != partition.n() {
        return Err(Error::Domain(format!(
            "community_status: state over {} vertices, partition over {}",
            state.n(),
            partition.n()
        )));
    }
    let statuses = state.statuses();
    Ok(CommunityStatus(
        (0..partition.m())
            .map(|c| partition.members(c).iter().any(|&v| statuses[v as usize]))
            .collect(),
    ))
}
