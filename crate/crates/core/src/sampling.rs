//! Uniform sampling on the simplex and Monte Carlo estimates of the expected
//! EMD.
//!
//! Sample `k` of a run draws from its own ChaCha stream, keyed by
//! `(seed, k)`. Samples are grouped into fixed blocks whose statistics are
//! merged in block order, so the estimate does not depend on how blocks are
//! spread across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simplex::{DistTuple, Distribution};
use crate::transport::emd;

/// Samples per reduction block.
const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean, from the unbiased sample variance.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Uniform point of `P_n` from the gaps between `n` sorted uniforms on
/// `[0, 1)`, padded by 0 and 1.
pub fn sample_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Distribution<f64>> {
    if n == 0 {
        return Err(Error::LengthTooShort(1));
    }
    let mut cuts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut mass = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    for &c in &cuts {
        mass.push(c - prev);
        prev = c;
    }
    mass.push(1.0 - prev);
    Distribution::new(mass)
}

/// The generator used for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Count, mean and centred sum of squares of a run of values.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

fn sample_emd(n: usize, d: usize, seed: u64, index: u64) -> Result<f64> {
    let mut rng = sample_rng(seed, index);
    let members = (0..d)
        .map(|_| sample_simplex(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(emd(&DistTuple::new(members)?))
}

fn run_block(n: usize, d: usize, samples: usize, seed: u64, block: usize) -> Result<Moments> {
    let start = block * BLOCK;
    let end = (start + BLOCK).min(samples);
    let mut m = Moments::default();
    for index in start..end {
        m.push(sample_emd(n, d, seed, index as u64)?);
    }
    Ok(m)
}

pub fn mc_expected_emd(n: usize, d: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get());
    mc_expected_emd_with_workers(n, d, samples, seed, workers)
}

/// Monte Carlo mean of `emd` over uniform tuples, on `workers` threads.
/// The result is bit-identical for every `workers >= 1`.
pub fn mc_expected_emd_with_workers(
    n: usize,
    d: usize,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if d < 2 {
        return Err(Error::TupleTooSmall(d));
    }
    if n == 0 {
        return Err(Error::LengthTooShort(1));
    }
    let blocks = samples.div_ceil(BLOCK);
    let workers = workers.clamp(1, blocks);

    let per_worker: Vec<Result<Vec<(usize, Moments)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..blocks)
                        .step_by(workers)
                        .map(|b| run_block(n, d, samples, seed, b).map(|m| (b, m)))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    });

    let mut by_block = vec![Moments::default(); blocks];
    for part in per_worker {
        for (b, m) in part? {
            by_block[b] = m;
        }
    }
    let total = by_block.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1.0);
    Ok(McEstimate {
        mean: total.mean,
        stderr: (variance.max(0.0) / total.count).sqrt(),
        samples,
        seed,
    })
}
