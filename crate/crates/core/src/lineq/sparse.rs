//! Monte-Carlo demonstration: sample sparse random subsets of the ground
//! set and measure the largest solution-free subset inside each sample.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prng::SplitMix64;

use super::count::{constraint_supports, max_set_avoiding};
use super::system::LinearSystem;

const SPARSE_GUARD: u64 = 60;

#[derive(Debug, Clone)]
pub struct SparseTrial {
    pub sample_size: usize,
    pub max_free: usize,
}

#[derive(Debug, Clone)]
pub struct SparseSummary {
    pub p: f64,
    pub trials: Vec<SparseTrial>,
    pub mean_sample: f64,
    pub mean_max_free: f64,
    /// mean of max_free / (p * |F|); zero when p = 0
    pub normalized_mean: f64,
}

/// Run `trials` independent samples at inclusion probability `p` and solve
/// each exactly. Trials derive their seeds from (seed, index), so the
/// summary is identical for any thread count.
pub fn sparse_random_experiment(
    sys: &LinearSystem,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<SparseSummary> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    let size = sys.ground.size();
    if size > SPARSE_GUARD {
        return Err(Error::scale(format!(
            "sparse experiment limited to |F| <= {SPARSE_GUARD}, got {size}"
        )));
    }
    let sols = sys.enumerate_solutions()?;
    let supports = constraint_supports(&sols);
    let elements: Vec<u64> = (0..size).collect();

    let results: Vec<SparseTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::derive(seed, t as u64);
            let sample: Vec<u64> = elements
                .iter()
                .copied()
                .filter(|_| rng.next_bool(p))
                .collect();
            let max_free = max_set_avoiding(size, &supports, Some(&sample)).len();
            SparseTrial {
                sample_size: sample.len(),
                max_free,
            }
        })
        .collect();

    let mean_sample =
        results.iter().map(|t| t.sample_size as f64).sum::<f64>() / trials.max(1) as f64;
    let mean_max_free =
        results.iter().map(|t| t.max_free as f64).sum::<f64>() / trials.max(1) as f64;
    let normalized_mean = if p > 0.0 {
        mean_max_free / (p * size as f64)
    } else {
        0.0
    };
    Ok(SparseSummary {
        p,
        trials: results,
        mean_sample,
        mean_max_free,
        normalized_mean,
    })
}
