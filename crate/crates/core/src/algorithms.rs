//! The noiseless pooled-test oracle and the two adaptive identification
//! algorithms, with exact test accounting.
//!
//! Both algorithms use the same fixed splitting procedure: test the full
//! unresolved set; on a positive, halve down to a singleton (the left half of
//! size ⌈s/2⌉ is tested first; a negative left half lets the right half be
//! inferred positive for free), mark the singleton infected and every
//! negatively-tested set healthy, then repeat on whatever is still
//! unclassified until a whole-set test comes back negative or nothing is
//! left. Input order is preserved throughout, so transcripts are
//! reproducible.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::CommunityPartition;
use crate::infection::{sample_sbim, SbimParams};
use crate::stats::RngStream;

/// One recorded pooled test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestRecord {
    pub subset: Vec<u32>,
    pub outcome: bool,
}

/// Hidden ground truth plus query accounting. Every query is answered with
/// the OR of the truth over the queried subset and appended to the
/// transcript.
#[derive(Debug, Clone)]
pub struct TestOracle {
    truth: Vec<bool>,
    transcript: Vec<TestRecord>,
}

impl TestOracle {
    pub fn new(truth: Vec<bool>) -> Self {
        TestOracle {
            truth,
            transcript: Vec::new(),
        }
    }

    pub fn population(&self) -> usize {
        self.truth.len()
    }

    /// Pools the subset: positive iff some member is infected. Counts the
    /// query and records it. Testing nobody is meaningless and rejected.
    pub fn query(&mut self, subset: &[u32]) -> Result<bool> {
        if subset.is_empty() {
            return Err(Error::Domain("query: empty subset".into()));
        }
        let n = self.truth.len();
        if let Some(&bad) = subset.iter().find(|&&v| v as usize >= n) {
            return Err(Error::Domain(format!(
                "query: item {bad} outside population [0, {n})"
            )));
        }
        let outcome = subset.iter().any(|&v| self.truth[v as usize]);
        self.transcript.push(TestRecord {
            subset: subset.to_vec(),
            outcome,
        });
        Ok(outcome)
    }

    pub fn queries_used(&self) -> usize {
        self.transcript.len()
    }

    pub fn transcript(&self) -> &[TestRecord] {
        &self.transcript
    }

    /// The hidden state, for verification after an algorithm has run.
    pub fn truth(&self) -> &[bool] {
        &self.truth
    }
}

/// Recovered statuses plus the number of tests the call consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmResult {
    pub recovered: Vec<bool>,
    pub tests_used: usize,
}

/// Which identification algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    BinarySplitting,
    GraphAware,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::BinarySplitting, Algorithm::GraphAware];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BinarySplitting => "binary-splitting",
            Algorithm::GraphAware => "graph-aware",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary-splitting" => Ok(Algorithm::BinarySplitting),
            "graph-aware" => Ok(Algorithm::GraphAware),
            other => Err(Error::Parse(format!(
                "unknown algorithm {other:?} (expected binary-splitting or graph-aware)"
            ))),
        }
    }
}

/// Runs the fixed splitting procedure over ordered groups of items, where a
/// query on a set of groups pools their union. Returns one status per group.
fn identify_defectives(oracle: &mut TestOracle, groups: &[&[u32]]) -> Result<Vec<bool>> {
    let mut pool = Vec::new();
    let mut query_groups = |oracle: &mut TestOracle, selected: &[usize]| -> Result<bool> {
        pool.clear();
        for &g in selected {
            pool.extend_from_slice(groups[g]);
        }
        oracle.query(&pool)
    };

    let mut status: Vec<Option<bool>> = vec![None; groups.len()];
    let mut unresolved: Vec<usize> = (0..groups.len()).collect();
    while !unresolved.is_empty() {
        if !query_groups(oracle, &unresolved)? {
            for &g in &unresolved {
                status[g] = Some(false);
            }
            break;
        }
        let mut lo = 0;
        let mut hi = unresolved.len();
        while hi - lo > 1 {
            let mid = lo + (hi - lo).div_ceil(2);
            if query_groups(oracle, &unresolved[lo..mid])? {
                hi = mid;
            } else {
                // Parent set was positive, so the right half must hold a
                // defective; no test needed for it.
                for &g in &unresolved[lo..mid] {
                    status[g] = Some(false);
                }
                lo = mid;
            }
        }
        status[unresolved[lo]] = Some(true);
        unresolved.retain(|&g| status[g].is_none());
    }
    Ok(status
        .into_iter()
        .map(|s| s.expect("splitting classifies every group"))
        .collect())
}

/// Identifies every infected item among `items` (non-empty, duplicate-free).
/// The result covers the full population; items outside `items` are reported
/// healthy.
pub fn binary_splitting(oracle: &mut TestOracle, items: &[u32]) -> Result<AlgorithmResult> {
    if items.is_empty() {
        return Err(Error::Domain("binary_splitting: no items".into()));
    }
    let mut seen = vec![false; oracle.population()];
    for &v in items {
        if v as usize >= oracle.population() {
            return Err(Error::Domain(format!(
                "binary_splitting: item {v} outside population"
            )));
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::Domain(format!(
                "binary_splitting: duplicate item {v}"
            )));
        }
    }
    let start = oracle.queries_used();
    let singles: Vec<&[u32]> = items.iter().map(std::slice::from_ref).collect();
    let statuses = identify_defectives(oracle, &singles)?;
    let mut recovered = vec![false; oracle.population()];
    for (&v, s) in items.iter().zip(statuses) {
        recovered[v as usize] = s;
    }
    Ok(AlgorithmResult {
        recovered,
        tests_used: oracle.queries_used() - start,
    })
}

/// Test counts of the two phases of the graph-aware run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAwareTrace {
    pub step2_tests: usize,
    pub step3_tests: usize,
    pub positive_communities: Vec<u32>,
}

/// Community-first identification: pool each community and run the splitting
/// procedure over those meta-items (a meta-pool of several communities pools
/// their union), then split again inside each positive community.
pub fn graph_aware(
    oracle: &mut TestOracle,
    partition: &CommunityPartition,
) -> Result<AlgorithmResult> {
    graph_aware_traced(oracle, partition).map(|(result, _)| result)
}

pub fn graph_aware_traced(
    oracle: &mut TestOracle,
    partition: &CommunityPartition,
) -> Result<(AlgorithmResult, GraphAwareTrace)> {
    if oracle.population() != partition.n() {
        return Err(Error::Domain(format!(
            "graph_aware: oracle population {} != partition population {}",
            oracle.population(),
            partition.n()
        )));
    }
    let start = oracle.queries_used();
    let communities: Vec<&[u32]> = (0..partition.m()).map(|c| partition.members(c)).collect();
    let community_status = identify_defectives(oracle, &communities)?;
    let step2_tests = oracle.queries_used() - start;

    let mut recovered = vec![false; partition.n()];
    let mut positive_communities = Vec::new();
    for (c, positive) in community_status.into_iter().enumerate() {
        if !positive {
            continue;
        }
        positive_communities.push(c as u32);
        let members = partition.members(c);
        let singles: Vec<&[u32]> = members.iter().map(std::slice::from_ref).collect();
        let statuses = identify_defectives(oracle, &singles)?;
        for (&v, s) in members.iter().zip(statuses) {
            recovered[v as usize] = s;
        }
    }
    let step3_tests = oracle.queries_used() - start - step2_tests;
    Ok((
        AlgorithmResult {
            recovered,
            tests_used: step2_tests + step3_tests,
        },
        GraphAwareTrace {
            step2_tests,
            step3_tests,
            positive_communities,
        },
    ))
}

/// One simulated trial: sample an infection, wrap it in an oracle, identify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub tests_used: usize,
    pub infected_count: usize,
    pub exact_recovery: bool,
}

pub fn run_trial(
    params: &SbimParams,
    partition: &CommunityPartition,
    algorithm: Algorithm,
    rng: &mut RngStream,
) -> Result<TrialRecord> {
    let state = sample_sbim(params, partition, rng)?;
    let infected_count = state.infected_count();
    let mut oracle = TestOracle::new(state.statuses().to_vec());
    let result = match algorithm {
        Algorithm::BinarySplitting => {
            let items: Vec<u32> = (0..params.n() as u32).collect();
            binary_splitting(&mut oracle, &items)?
        }
        Algorithm::GraphAware => graph_aware(&mut oracle, partition)?,
    };
    if result.recovered != oracle.truth() {
        return Err(Error::Internal(format!(
            "{algorithm} failed exact recovery on n = {}, infected = {infected_count}",
            params.n()
        )));
    }
    Ok(TrialRecord {
        tests_used: result.tests_used,
        infected_count,
        exact_recovery: true,
    })
}

/// Transcript dump: one line per test, `t subset-size csv-of-ids outcome`,
/// with t counting from 1 and outcome printed as 1 (positive) or 0.
pub fn format_transcript(transcript: &[TestRecord]) -> String {
    let mut out = String::new();
    for (t, record) in transcript.iter().enumerate() {
        let ids = record
            .subset
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "{} {} {} {}",
            t + 1,
            record.subset.len(),
            ids,
            record.outcome as u8
        );
    }
    out
}

/// Parses the dump format back; used by replay tests.
pub fn parse_transcript(text: &str) -> Result<Vec<TestRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("transcript line {}: {line:?}", i + 1)));
        }
        let size: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("transcript line {}: bad size", i + 1)))?;
        let subset: Vec<u32> = fields[2]
            .split(',')
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("transcript line {}: bad id {s:?}", i + 1)))
            })
            .collect::<Result<_>>()?;
        if subset.len() != size {
            return Err(Error::Parse(format!(
                "transcript line {}: size {size} != {} ids",
                i + 1,
                subset.len()
            )));
        }
        let outcome = match fields[3] {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse(format!(
                    "transcript line {}: bad outcome {other:?}",
                    i + 1
                )))
            }
        };
        out.push(TestRecord { subset, outcome });
    }
    Ok(out)
}
