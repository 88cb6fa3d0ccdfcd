//! Timing harness for reflector-chain accumulation.

use std::time::Instant;

use hproj_core::rng::{gaussian_vec, seeded};
use hproj_core::wy::{accumulate, Accumulation};
use hproj_core::{Matrix, ReflectorChain};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub d: usize,
    pub m: usize,
    pub method: String,
    pub workers: usize,
    pub ms_median: f64,
    pub reps: usize,
    pub checksum: f64,
}

/// `m` i.i.d. Gaussian reflectors in dimension `d`.
pub fn bench_chain(d: usize, m: usize, seed: u64) -> Result<ReflectorChain> {
    let mut rng = seeded(seed);
    let vectors = (0..m).map(|_| gaussian_vec(&mut rng, d)).collect();
    Ok(ReflectorChain::from_vectors(d, vectors)?)
}

/// Sum of entries rounded to `1e-6`.
pub fn checksum(m: &Matrix) -> f64 {
    let s: f64 = m.as_slice().iter().sum();
    (s * 1e6).round() / 1e6
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times accumulation of a seeded chain to a dense matrix: one discarded
/// warm-up run, then the median over `reps` runs.
pub fn bench_accumulation(
    d: usize,
    m: usize,
    method: Accumulation,
    workers: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchReport> {
    if reps < 3 {
        return Err(Error::Usage(format!("reps must be at least 3, got {reps}")));
    }
    let chain = bench_chain(d, m, seed)?;
    let workers = workers.max(1);
    let reference = accumulate(&chain, method, workers)?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let out = accumulate(&chain, method, workers)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        debug_assert_eq!(out, reference);
        std::hint::black_box(out);
        times.push(elapsed);
    }
    Ok(BenchReport {
        d,
        m,
        method: method.as_str().to_string(),
        workers,
        // a run faster than the clock's resolution still took nonzero time
        ms_median: median(times).max(1e-6),
        reps,
        checksum: checksum(&reference),
    })
}
