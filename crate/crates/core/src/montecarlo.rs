//! Monte-Carlo estimate of `λ(R_N^n <= x)` for Lebesgue-distributed starting points.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cf::{renyi_map, Parameter};
use crate::error::{Error, Result};
use crate::measure::RhoMeasure;

/// Samples per batch. Batch `b` draws from stream `b` of the seeded generator,
/// so results do not depend on how batches are scheduled.
pub const BATCH_SIZE: usize = 1 << 16;

/// Description of the sample generator, for reports.
pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64(seed), stream = batch index, 65536 samples per batch";

/// Sorted sample with its empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut points: Vec<f64>) -> Self {
        points.sort_unstable_by(f64::total_cmp);
        Self { sorted: points }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of points `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&p| p <= x) as f64 / self.sorted.len() as f64
    }

    /// Kolmogorov–Smirnov distance `sup_x |F_emp(x) - F(x)|` to a continuous CDF.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let len = self.sorted.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = cdf(x);
            worst = worst.max((i + 1) as f64 / len - f).max(f - i as f64 / len);
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub n: Parameter,
    pub iterations: usize,
    pub seed: u64,
    pub empirical: EmpiricalCdf,
    /// KS distance to `ρ_N([0, x])`.
    pub ks_rho: f64,
    /// KS distance to the uniform CDF `x`.
    pub ks_uniform: f64,
}

impl MonteCarloRun {
    pub fn samples(&self) -> usize {
        self.empirical.len()
    }

    /// `multiplier / √samples + q^iterations`.
    pub fn envelope(&self, q: f64, multiplier: f64) -> f64 {
        multiplier / (self.samples() as f64).sqrt() + q.powi(self.iterations as i32)
    }

    /// CSV `x,empirical,rho` on `points` equally spaced abscissae in `[0, 1]`.
    pub fn to_csv(&self, points: usize) -> String {
        let rho = RhoMeasure::new(self.n);
        let mut out = String::from("x,empirical,rho\n");
        let last = points.saturating_sub(1).max(1) as f64;
        for k in 0..points {
            let x = k as f64 / last;
            let _ = writeln!(out, "{x},{},{}", self.empirical.eval(x), rho.cdf_unchecked(x));
        }
        out
    }
}

fn run_batch(n: Parameter, iterations: usize, seed: u64, batch: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    (0..len)
        .map(|_| {
            let mut x: f64 = rng.gen();
            for _ in 0..iterations {
                x = renyi_map(n, x).expect("orbit stays in [0, 1)");
            }
            x
        })
        .collect()
}

/// Draws `samples` uniform points, applies `R_N` `iterations` times and
/// compares the empirical distribution of the images with `ρ_N`.
pub fn monte_carlo_cdf(n: Parameter, iterations: usize, samples: usize, seed: u64) -> Result<MonteCarloRun> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let points: Vec<f64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            run_batch(n, iterations, seed, b, len)
        })
        .flatten_iter()
        .collect();
    let empirical = EmpiricalCdf::new(points);
    let rho = RhoMeasure::new(n);
    let ks_rho = empirical.ks_distance(|x| rho.cdf_unchecked(x));
    let ks_uniform = empirical.ks_distance(|x| x);
    Ok(MonteCarloRun {
        n,
        iterations,
        seed,
        empirical,
        ks_rho,
        ks_uniform,
    })
}
