//! Seeded sampling helpers.
//!
//! All randomized routines in this crate draw from ChaCha12, a counter-based
//! stream cipher RNG: a (seed, stream) pair fully determines the sequence, so
//! reports are reproducible and independent trials can be split by stream
//! index without order dependence.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent per-trial stream under a shared base seed.
pub fn rng_for_trial(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial.into());
    rng
}

/// Uniform direction on the euclidean unit sphere.
pub fn unit_direction(rng: &mut ChaCha12Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random point of the unit simplex (flat Dirichlet via exponentials).
pub fn simplex_weights(rng: &mut ChaCha12Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| {
        let e: f64 = Exp1.sample(rng);
        e.max(1e-300)
    }).collect();
    let s: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= s;
    }
    w
}

pub fn uniform_in(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Deterministic batch of sphere directions; for dim 1 this is just {+1,-1}.
pub fn sphere_directions(seed: u64, dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| unit_direction(&mut rng, dim)).collect()
}
