//! Deterministic randomness, elementary information-theoretic functions, and
//! summary statistics shared by every other module.
//!
//! Randomness is counter-based: an [`RngStream`] is fully determined by a
//! `(seed, stream_id)` pair, so any piece of work can derive its own stream
//! and produce identical results regardless of scheduling.

use rand::RngCore;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a list of integers into a single stream id.
///
/// Used to derive independent streams for (grid-point, trial, algorithm)
/// tuples; include a distinct leading tag per purpose so different consumers
/// of the same indices never collide.
pub fn derive_stream_id(parts: &[u64]) -> u64 {
    let mut acc = 0x243F_6A88_85A3_08D3u64;
    for &p in parts {
        acc = mix(acc ^ mix(p.wrapping_add(GOLDEN_GAMMA)));
    }
    acc
}

/// A deterministic, splittable random stream.
///
/// The same `(seed, stream_id)` always yields the identical sample sequence;
/// distinct stream ids derived from one seed behave as statistically
/// independent streams. Values are cheap to clone and safe to move across
/// threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    key: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = mix(mix(seed ^ GOLDEN_GAMMA).wrapping_add(mix(stream_id)));
        RngStream {
            seed,
            stream_id,
            key,
            counter: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self
            .key
            .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One coin flip; callers are responsible for `p` being in [0, 1].
    /// Exact at the endpoints: `p = 0` never succeeds, `p = 1` always does.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (RngStream::next_u64(self) >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        RngStream::next_u64(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = RngStream::next_u64(self).to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Binary entropy in bits: −x·log2(x) − (1−x)·log2(1−x), with the limit
/// convention of 0 at x ∈ {0, 1}.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "binary_entropy: argument {x} outside [0, 1]"
        )));
    }
    Ok(hb(x))
}

/// Unchecked binary entropy for internal callers whose arguments are
/// probabilities by construction.
#[inline]
pub(crate) fn hb(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -(x * x.ln() + (1.0 - x) * (-x).ln_1p()) / std::f64::consts::LN_2
}

/// Numerically stable (1 − x)^r for x ∈ [0, 1], r ≥ 0.
#[inline]
pub(crate) fn pow1m(x: f64, r: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x) && r >= 0.0);
    if r == 0.0 {
        return 1.0;
    }
    if x == 1.0 {
        return 0.0;
    }
    (r * (-x).ln_1p()).exp()
}

/// Draws from Binomial(trials, p).
///
/// Exact Bernoulli summation for trials ≤ 64; an inversion/rejection sampler
/// above that, so trial counts in the 10^3..10^6 range stay O(1) per draw.
pub fn binom_sample(trials: u64, p: f64, rng: &mut RngStream) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "binom_sample: probability {p} outside [0, 1]"
        )));
    }
    if trials == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(trials);
    }
    if trials <= 64 {
        let mut count = 0;
        for _ in 0..trials {
            if rng.bernoulli(p) {
                count += 1;
            }
        }
        Ok(count)
    } else {
        let dist = Binomial::new(trials, p).map_err(|e| {
            Error::Internal(format!("binomial sampler rejected ({trials}, {p}): {e}"))
        })?;
        Ok(dist.sample(rng))
    }
}

/// Count, sample mean, sample standard deviation, and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
}

/// Summarizes a non-empty sequence. The standard deviation uses divisor
/// count − 1 when count ≥ 2 and is 0 for a singleton; the standard error is
/// std_dev / sqrt(count).
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Domain("summarize: empty sequence".into()));
    }
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std_dev = if count >= 2 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SummaryStats {
        count,
        mean,
        std_dev,
        std_error: std_dev / (count as f64).sqrt(),
    })
}
