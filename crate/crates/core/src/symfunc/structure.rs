use rand::Rng;

use super::{level_on_shift, FuncFamily, LambdaTuple};
use crate::error::{Error, Result};
use crate::sampling;
use crate::spectra::symmetric_eigenvalues;

/// Worst-case findings of [`check_structure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub samples: usize,
    /// `min` over samples of `min_i f_i(λ)`.
    pub min_gradient: f64,
    pub gradient_violations: usize,
    /// `max` over samples of `λ_max(D²f) / (1 + ‖D²f‖)`.
    pub max_hessian_eig: f64,
    pub hessian_violations: usize,
    /// `max` over ordered pairs of `f(μ) - f(λ) - Σ f_i(λ)(μ_i - λ_i)`.
    pub chord_worst: f64,
    pub chord_violations: usize,
    /// `max` relative mismatch of the analytic gradient against central
    /// differences (step `1e-5`), over the well-conditioned samples.
    pub fd_gradient_mismatch: f64,
    pub fd_checked: usize,
    pub fd_violations: usize,
}

impl StructureReport {
    pub fn is_clean(&self) -> bool {
        self.gradient_violations == 0
            && self.hessian_violations == 0
            && self.chord_violations == 0
            && self.fd_violations == 0
    }
}

pub const HESSIAN_TOL: f64 = 1e-7;
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;

/// Samples whose distance to `∂Γ` along `1⃗` is below this are skipped by
/// the finite-difference gradient check.
const FD_MIN_SHIFT: f64 = 0.05;

/// Verifies ellipticity, concavity of the Hessian, the concavity chord
/// inequality and the analytic gradient over `samples` seeded points of `Γ`.
pub fn check_structure(f: &FuncFamily, samples: usize, seed: u64) -> Result<StructureReport> {
    if samples == 0 {
        return Err(Error::Domain("check_structure needs at least one sample".into()));
    }
    let mut rng = sampling::rng(seed);
    let k = f.cone_index();
    let points: Vec<Vec<f64>> = (0..samples).map(|_| sampling::sample_cone(&mut rng, f.n, k, 0.9)).collect();
    let jets: Vec<_> = points.iter().map(|p| f.jet(p)).collect::<Result<_>>()?;

    let mut report = StructureReport {
        samples,
        min_gradient: f64::INFINITY,
        gradient_violations: 0,
        max_hessian_eig: f64::NEG_INFINITY,
        hessian_violations: 0,
        chord_worst: f64::NEG_INFINITY,
        chord_violations: 0,
        fd_gradient_mismatch: 0.0,
        fd_checked: 0,
        fd_violations: 0,
    };

    for (p, jet) in points.iter().zip(&jets) {
        let gmin = jet.grad.iter().copied().fold(f64::INFINITY, f64::min);
        report.min_gradient = report.min_gradient.min(gmin);
        if !(gmin > 0.0) {
            report.gradient_violations += 1;
        }

        let norm = jet.hess.iter().flatten().map(|h| h * h).sum::<f64>().sqrt();
        let top = symmetric_eigenvalues(&jet.hess)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let rel = top / (1.0 + norm);
        report.max_hessian_eig = report.max_hessian_eig.max(rel);
        if rel > HESSIAN_TOL {
            report.hessian_violations += 1;
        }

        if crate::sampling::max_shift(p, k) >= FD_MIN_SHIFT {
            report.fd_checked += 1;
            let gnorm = jet.grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
            let mut worst = 0.0f64;
            for i in 0..f.n {
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[i] += FD_STEP;
                minus[i] -= FD_STEP;
                let fd = (f.eval_slice(&plus)? - f.eval_slice(&minus)?) / (2.0 * FD_STEP);
                worst = worst.max((fd - jet.grad[i]).abs() / gnorm);
            }
            report.fd_gradient_mismatch = report.fd_gradient_mismatch.max(worst);
            if worst > FD_TOL {
                report.fd_violations += 1;
            }
        }
    }

    for (i, (lam, jl)) in points.iter().zip(&jets).enumerate() {
        for (j, (mu, jm)) in points.iter().zip(&jets).enumerate() {
            if i == j {
                continue;
            }
            let linear: f64 = (0..f.n).map(|a| jl.grad[a] * (mu[a] - lam[a])).sum();
            let gap = jm.value - jl.value - linear;
            let tol = 1e-9 * (1.0 + jm.value.abs() + jl.value.abs() + linear.abs());
            report.chord_worst = report.chord_worst.max(gap);
            if gap > tol {
                report.chord_violations += 1;
            }
        }
    }
    Ok(report)
}

/// Empirical `min |λ|·Σ f_i(λ)` over sampled `λ ∈ Γ` with
/// `σ_lo ≤ f(λ) ≤ σ_hi` and `|λ| ≥ R_1`.
///
/// Samples come from three sources: the sphere `|λ| = R_1`, random radii in
/// `[R_1, 8R_1]`, and level-set points `b + t·1⃗` over random bases.
pub fn coercivity_floor(f: &FuncFamily, sigma_lo: f64, sigma_hi: f64, r1: f64, samples: usize) -> Result<f64> {
    if !(sigma_lo <= sigma_hi) {
        return Err(Error::Domain(format!("empty band [{sigma_lo}, {sigma_hi}]")));
    }
    if !(r1 > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r1}")));
    }
    let mut rng = sampling::rng(0x5eed ^ samples as u64);
    let n = f.n;
    let mut floor = f64::INFINITY;
    let mut accepted = 0usize;
    let mut consider = |lambda: &[f64]| {
        let norm = lambda.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < r1 * (1.0 - 1e-12) || !f.admits(lambda) {
            return;
        }
        let Ok(jet) = f.jet(lambda) else { return };
        if jet.value < sigma_lo || jet.value > sigma_hi {
            return;
        }
        accepted += 1;
        floor = floor.min(norm * jet.grad.iter().sum::<f64>());
    };
    for s in 0..samples {
        match s % 3 {
            0 => {
                let dir = sampling::sphere_direction(&mut rng, n);
                let p: Vec<f64> = dir.iter().map(|d| d * r1).collect();
                consider(&p);
            }
            1 => {
                let dir = sampling::sphere_direction(&mut rng, n);
                let r = r1 * (1.0 + 7.0 * rng.gen::<f64>());
                let p: Vec<f64> = dir.iter().map(|d| d * r).collect();
                consider(&p);
            }
            _ => {
                let base: Vec<f64> = (0..n).map(|_| r1 * (8.0 * rng.gen::<f64>() - 4.0)).collect();
                let level = sigma_lo + rng.gen::<f64>() * (sigma_hi - sigma_lo);
                if let Ok(p) = level_on_shift(f, &base, level) {
                    consider(&p);
                }
            }
        }
    }
    if accepted == 0 {
        return Err(Error::EmptyBand(format!(
            "no sample with f in [{sigma_lo}, {sigma_hi}] and |λ| >= {r1}"
        )));
    }
    Ok(floor)
}

/// `Σ f_i(λ)`.
pub fn gradient_sum(f: &FuncFamily, lambda: &LambdaTuple) -> Result<f64> {
    Ok(f.grad(lambda)?.as_slice().iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logdet_structure_clean() {
        let r = check_structure(&FuncFamily::log_det(3).unwrap(), 100, 1).unwrap();
        assert!(r.is_clean(), "{r:?}");
        assert!(r.fd_checked > 0);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(check_structure(&FuncFamily::log_det(3).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn linear_floor_is_n_r1() {
        let f = FuncFamily::sigma_root(3, 1).unwrap();
        let floor = coercivity_floor(&f, 0.0, 1.0, 1.0, 3000).unwrap();
        assert!(floor >= 3.0 * (1.0 - 1e-12) && floor <= 3.0 * (1.0 + 1e-9), "{floor}");
    }

    #[test]
    fn empty_band_errors() {
        let f = FuncFamily::sigma_root(3, 2).unwrap();
        assert!(matches!(coercivity_floor(&f, -3.0, -2.0, 1.0, 100), Err(Error::EmptyBand(_))));
    }
}
