//! Experiment runner: parameter sweeps with repeated trials, closed-form
//! bound overlays, Monte-Carlo lower bounds, and CSV emission.
//!
//! Trials fan out across worker threads, but every (grid-point, trial,
//! algorithm) tuple owns an RNG stream derived from the config seed and
//! results are reduced in index order, so output is byte-identical no matter
//! how many threads run.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::algorithms::{run_trial, Algorithm, TrialRecord};
use crate::bounds::{lb_sbim_mc, ub_binary_sbim, ub_graphaware_sbim};
use crate::error::{Error, Result};
use crate::graph::CommunityPartition;
use crate::infection::SbimParams;
use crate::stats::{derive_stream_id, summarize, RngStream, SummaryStats};

/// Schema version of the emitted CSV; printed by `--version`.
pub const CSV_SCHEMA_VERSION: &str = "1";

pub const CSV_HEADER: &str =
    "p,alg,mean_tests,std_tests,stderr_tests,mean_alpha,ub,lb,lb_halfwidth";

// Purpose tags keeping trial streams and lower-bound streams disjoint.
const STREAM_TRIAL: u64 = 1;
const STREAM_LOWER_BOUND: u64 = 2;

/// A full sweep description. `p_grid` values must be strictly increasing.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub p_grid: Vec<f64>,
    pub q1: f64,
    pub q2: f64,
    pub trials_per_point: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.k == 0 {
            return err(format!(
                "n/k: must be positive (n = {}, k = {})",
                self.n, self.k
            ));
        }
        if !self.n.is_multiple_of(self.k) {
            return err(format!("k: {} does not divide n = {}", self.k, self.n));
        }
        if self.p_grid.is_empty() {
            return err("p_grid: must be non-empty".into());
        }
        for &p in &self.p_grid {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("p_grid: value {p} outside [0, 1]"));
            }
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return err("p_grid: values must be strictly increasing".into());
        }
        for (name, v) in [("q1", self.q1), ("q2", self.q2)] {
            if !(0.0..=1.0).contains(&v) {
                return err(format!("{name}: value {v} outside [0, 1]"));
            }
        }
        if self.q2 > self.q1 {
            return err(format!("q2: {} exceeds q1 = {}", self.q2, self.q1));
        }
        if self.trials_per_point == 0 {
            return err("trials: must be >= 1".into());
        }
        if self.mc_samples == 0 {
            return err("mc_samples: must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return err("algorithms: must name at least one algorithm".into());
        }
        let mut seen = std::collections::HashSet::new();
        for alg in &self.algorithms {
            if !seen.insert(alg) {
                return err(format!("algorithms: {alg} listed twice"));
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` config format (`#` starts a comment).
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut k = None;
        let mut p_grid = None;
        let mut q1 = None;
        let mut q2 = None;
        let mut trials = None;
        let mut mc_samples = None;
        let mut seed = None;
        let mut algorithms = None;
        let mut out = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            fn set<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<()> {
                if slot.is_some() {
                    return Err(Error::Config(format!("{key}: set twice")));
                }
                *slot = Some(value);
                Ok(())
            }
            let parse_num = |what: &str| -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("{what}: cannot parse {value:?}")))
            };
            let parse_count = |what: &str| -> Result<usize> {
                value.parse::<usize>().map_err(|_| {
                    Error::Config(format!("{what}: cannot parse {value:?} as an integer"))
                })
            };
            match key {
                "n" => set(&mut n, key, parse_count("n")?)?,
                "k" => set(&mut k, key, parse_count("k")?)?,
                "p_grid" => {
                    let grid: Vec<f64> = value
                        .split(',')
                        .map(|s| {
                            s.trim().parse::<f64>().map_err(|_| {
                                Error::Config(format!("p_grid: cannot parse {:?}", s.trim()))
                            })
                        })
                        .collect::<Result<_>>()?;
                    set(&mut p_grid, key, grid)?;
                }
                "q1" => set(&mut q1, key, parse_num("q1")?)?,
                "q2" => set(&mut q2, key, parse_num("q2")?)?,
                "trials" => set(&mut trials, key, parse_count("trials")?)?,
                "mc_samples" => set(&mut mc_samples, key, parse_count("mc_samples")?)?,
                "seed" => {
                    let v = value
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("seed: cannot parse {value:?}")))?;
                    set(&mut seed, key, v)?;
                }
                "algorithms" => {
                    let algs: Vec<Algorithm> = value
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<Algorithm>()
                                .map_err(|e| Error::Config(e.to_string()))
                        })
                        .collect::<Result<_>>()?;
                    set(&mut algorithms, key, algs)?;
                }
                "out" => set(&mut out, key, PathBuf::from(value))?,
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }

        let require = |name: &str| Error::Config(format!("{name}: missing required key"));
        let config = ExperimentConfig {
            n: n.ok_or_else(|| require("n"))?,
            k: k.ok_or_else(|| require("k"))?,
            p_grid: p_grid.ok_or_else(|| require("p_grid"))?,
            q1: q1.ok_or_else(|| require("q1"))?,
            q2: q2.ok_or_else(|| require("q2"))?,
            trials_per_point: trials.unwrap_or(20),
            mc_samples: mc_samples.unwrap_or(100_000),
            seed: seed.unwrap_or(0),
            algorithms: algorithms.unwrap_or_else(|| Algorithm::ALL.to_vec()),
            output_path: out,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_config_text(&text)
    }
}

/// Per-algorithm aggregate at one grid point.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub tests: SummaryStats,
    pub infected: SummaryStats,
    pub upper_bound: f64,
}

/// One grid point: per-algorithm statistics plus the bound overlays.
/// Every trial behind the row achieved exact recovery.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub p: f64,
    pub algorithms: Vec<AlgorithmSummary>,
    pub lb_estimate: f64,
    pub lb_halfwidth: f64,
}

impl SweepRow {
    pub fn summary_for(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Runs the sweep: `trials_per_point` independent trials per (p, algorithm),
/// then summary statistics, the closed-form bounds, and the Monte-Carlo lower
/// bound per grid point. Fully deterministic given the config seed.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let partition = CommunityPartition::contiguous(config.n, config.k)?;
    let params: Vec<SbimParams> = config
        .p_grid
        .iter()
        .map(|&p| SbimParams::new(config.n, config.k, p, config.q1, config.q2))
        .collect::<Result<_>>()?;

    struct Job {
        p_index: usize,
        alg_index: usize,
        trial_index: usize,
    }
    let mut jobs = Vec::new();
    for p_index in 0..config.p_grid.len() {
        for alg_index in 0..config.algorithms.len() {
            for trial_index in 0..config.trials_per_point {
                jobs.push(Job {
                    p_index,
                    alg_index,
                    trial_index,
                });
            }
        }
    }

    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|job| {
            let stream = derive_stream_id(&[
                STREAM_TRIAL,
                job.p_index as u64,
                job.trial_index as u64,
                job.alg_index as u64,
            ]);
            let mut rng = RngStream::new(config.seed, stream);
            run_trial(
                &params[job.p_index],
                &partition,
                config.algorithms[job.alg_index],
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;

    let lower_bounds: Vec<(f64, f64)> = (0..config.p_grid.len())
        .into_par_iter()
        .map(|p_index| {
            let stream = derive_stream_id(&[STREAM_LOWER_BOUND, p_index as u64]);
            let mut rng = RngStream::new(config.seed, stream);
            lb_sbim_mc(&params[p_index], config.mc_samples, &mut rng)
                .map(|lb| (lb.estimate, lb.halfwidth))
        })
        .collect::<Result<_>>()?;

    // Reduce in deterministic index order.
    let trials = config.trials_per_point;
    let algs = config.algorithms.len();
    let mut rows = Vec::with_capacity(config.p_grid.len());
    for (p_index, params) in params.iter().enumerate() {
        let mut summaries = Vec::with_capacity(algs);
        for (alg_index, &algorithm) in config.algorithms.iter().enumerate() {
            let base = (p_index * algs + alg_index) * trials;
            let slice = &records[base..base + trials];
            debug_assert!(slice.iter().all(|r| r.exact_recovery));
            let tests: Vec<f64> = slice.iter().map(|r| r.tests_used as f64).collect();
            let infected: Vec<f64> = slice.iter().map(|r| r.infected_count as f64).collect();
            let upper_bound = match algorithm {
                Algorithm::BinarySplitting => ub_binary_sbim(params),
                Algorithm::GraphAware => ub_graphaware_sbim(params),
            };
            summaries.push(AlgorithmSummary {
                algorithm,
                tests: summarize(&tests)?,
                infected: summarize(&infected)?,
                upper_bound,
            });
        }
        rows.push(SweepRow {
            p: config.p_grid[p_index],
            algorithms: summaries,
            lb_estimate: lower_bounds[p_index].0,
            lb_halfwidth: lower_bounds[p_index].1,
        });
    }
    Ok(rows)
}

/// Renders rows in the fixed CSV schema: one line per (p, algorithm), fixed
/// 6-decimal formatting, LF line endings.
pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("csv: no rows".into()));
    }
    let mut out = String::with_capacity(64 * rows.len() + CSV_HEADER.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        for alg in &row.algorithms {
            out.push_str(&format!(
                "{:.6},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                row.p,
                alg.algorithm,
                alg.tests.mean,
                alg.tests.std_dev,
                alg.tests.std_error,
                alg.infected.mean,
                alg.upper_bound,
                row.lb_estimate,
                row.lb_halfwidth,
            ));
        }
    }
    Ok(out)
}

/// Writes the CSV to `path`. Refuses empty row sets before touching the file.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let text = csv_string(rows)?;
    fs::write(path, text)?;
    Ok(())
}
