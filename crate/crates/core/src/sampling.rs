//! Seed-deterministic samplers for cones and directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symfunc::cone_margin;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of `Γ_k`: exponential draws on the positive orthant, sheared
/// toward `∂Γ_k` along `-1⃗` by a random fraction (at most `shear_max`) of
/// the largest admissible shift.
pub fn sample_cone(rng: &mut SampleRng, n: usize, k: usize, shear_max: f64) -> Vec<f64> {
    let base: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-3).collect();
    let s_max = max_shift(&base, k);
    let s = rng.gen::<f64>() * shear_max * s_max;
    base.iter().map(|v| v - s).collect()
}

/// Largest `s` with `base - s·1⃗` still (just) in `Γ_k`.
pub fn max_shift(base: &[f64], k: usize) -> f64 {
    let mut lo = 0.0;
    // at s = max(base) every entry is <= 0, so σ_1 <= 0
    let mut hi = base.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if cone_margin(base, k) <= 0.0 {
        return 0.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let shifted: Vec<f64> = base.iter().map(|v| v - mid).collect();
        if cone_margin(&shifted, k) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * (1.0 + hi.abs()) {
            break;
        }
    }
    lo
}

/// Unit vector with strictly positive entries.
pub fn positive_direction(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-6).collect();
    normalize(v)
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn sphere_direction(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn gaussian(rng: &mut SampleRng) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}
