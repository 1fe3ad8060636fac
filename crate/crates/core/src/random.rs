//! Seeded sampling helpers shared by the samplers and the synthetic data
//! generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed for item `index` of a batch.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut x = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Draws an index with probability proportional to `weights`.
///
/// Uses exactly one uniform draw. Weights must be non-negative with a
/// positive sum.
pub fn sample_discrete<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = k;
            if u < w {
                return k;
            }
            u -= w;
        }
    }
    last_positive
}

/// Symmetric Dirichlet draw of dimension `dim`.
///
/// Gamma variates are formed in log space (`G(a) = G(a+1) * U^(1/a)`) so
/// that very small concentrations do not underflow to an all-zero vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(concentration: f64, dim: usize, rng: &mut R) -> Vec<f64> {
    assert!(concentration > 0.0 && dim >= 1);
    if dim == 1 {
        return vec![1.0];
    }
    let gamma = Gamma::new(concentration + 1.0, 1.0).expect("positive shape");
    let logs: Vec<f64> = (0..dim)
        .map(|_| {
            let g: f64 = gamma.sample(rng);
            let u = 1.0 - rng.random::<f64>();
            g.ln() + u.ln() / concentration
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}
