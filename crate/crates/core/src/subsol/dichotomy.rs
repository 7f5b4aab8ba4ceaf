use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{gaussian, positive_direction, rng};
use crate::symfunc::{level_along, level_on_shift, level_tolerance, FuncFamily, LambdaTuple};

pub const HYPOTHESIS_RAYS: usize = 200;
const HYPOTHESIS_SEED: u64 = 0xd1c0;
const MAX_DOUBLINGS: usize = 60;

/// Sampled evidence for `(μ − 2δ1⃗ + Γ_n) ∩ ∂Γ^σ ⊂ B_R(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCertificate {
    pub rays: usize,
    pub crossings: usize,
    pub max_radius: f64,
}

/// Constants of the ε-dichotomy for fixed `(f, σ, μ, δ, R)`.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyContext {
    pub family: FuncFamily,
    pub sigma: f64,
    pub mu: LambdaTuple,
    pub delta: f64,
    pub r: f64,
    pub r0: f64,
    pub eps1: f64,
    pub delta0: f64,
    pub epsilon: f64,
    pub certificate: HypothesisCertificate,
}

/// The six terms whose minimum is ε.
pub fn epsilon_terms(delta: f64, r0: f64, eps1: f64, delta0: f64) -> [f64; 6] {
    [
        delta0 / (2.0 * r0),
        delta * (1.0 - eps1) / (2.0 * r0),
        eps1 / (2.0 * r0),
        delta0 / (2.0 * (1.0 + eps1)),
        delta / 2.0,
        eps1 / (2.0 * (1.0 + eps1)),
    ]
}

pub fn epsilon_formula(delta: f64, r0: f64, eps1: f64, delta0: f64) -> f64 {
    epsilon_terms(delta, r0, eps1, delta0).into_iter().fold(f64::INFINITY, f64::min)
}

/// Shoots rays from `μ − 2δ1⃗` and checks every crossing of `f = σ` lies in
/// `B_R(0)`.
pub fn certify_hypothesis(
    f: &FuncFamily,
    sigma: f64,
    mu: &LambdaTuple,
    delta: f64,
    r: f64,
) -> Result<HypothesisCertificate> {
    let n = mu.len();
    let base: Vec<f64> = mu.as_slice().iter().map(|m| m - 2.0 * delta).collect();
    let mut dirs = vec![vec![1.0; n]];
    for i in 0..n {
        let mut d = vec![1e-3; n];
        d[i] = 1.0;
        dirs.push(d);
    }
    let mut g = rng(HYPOTHESIS_SEED);
    while dirs.len() < HYPOTHESIS_RAYS {
        dirs.push(positive_direction(&mut g, n));
    }
    let hits: Vec<Option<f64>> = dirs
        .par_iter()
        .map(|d| Ok(level_along(f, &base, d, sigma)?.map(|(_, p)| p.iter().map(|x| x * x).sum::<f64>().sqrt())))
        .collect::<Result<_>>()?;
    let radii: Vec<f64> = hits.into_iter().flatten().collect();
    let max_radius = radii.iter().copied().fold(0.0, f64::max);
    if max_radius >= r {
        return Err(Error::Hypothesis(format!(
            "level set meets μ − 2δ1 + Γ_n at radius {max_radius:.6} >= R = {r}"
        )));
    }
    Ok(HypothesisCertificate { rays: dirs.len(), crossings: radii.len(), max_radius })
}

fn above(f: &FuncFamily, sigma: f64, p: &[f64]) -> Option<f64> {
    if !f.admits(p) {
        return None;
    }
    f.eval_slice(p).ok().filter(|v| *v > sigma).map(|v| v - sigma)
}

fn bumped(base: &[f64], scale: f64, r0: f64, i: usize) -> Vec<f64> {
    let mut p: Vec<f64> = base.iter().map(|b| b * scale).collect();
    p[i] += r0;
    p
}

pub fn build_context(f: &FuncFamily, sigma: f64, mu: &LambdaTuple, delta: f64, r: f64) -> Result<DichotomyContext> {
    if mu.len() != f.n {
        return Err(Error::Domain(format!("μ has {} entries, family has n = {}", mu.len(), f.n)));
    }
    if !(sigma > f.sup_boundary() && sigma < f.sup_cone()) {
        return Err(Error::Domain(format!("level {sigma} must lie strictly between sup over the boundary and sup over the cone")));
    }
    if !(delta > 0.0 && r > 0.0 && delta.is_finite() && r.is_finite()) {
        return Err(Error::Domain("δ and R must be positive".into()));
    }
    if !f.admits(mu.as_slice()) {
        return Err(Error::Inadmissible(format!("μ = {:?} outside the cone", mu.as_slice())));
    }
    let certificate = certify_hypothesis(f, sigma, mu, delta, r)?;
    let n = f.n;
    let tilde: Vec<f64> = mu.as_slice().iter().map(|m| m - delta).collect();
    let all_above = |r0: f64| (0..n).all(|i| above(f, sigma, &bumped(&tilde, 1.0, r0, i)).is_some());

    let floor = tilde.iter().map(|t| r - t).fold(0.0, f64::max);
    let mut r0_min = floor;
    if !all_above(r0_min) {
        let mut lo = r0_min;
        let mut hi = r0_min.max(1.0);
        let mut found = false;
        for _ in 0..MAX_DOUBLINGS {
            if all_above(hi) {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return Err(Error::Hypothesis("no R0 with f(μ̃ + R0 e_i) > σ for every i".into()));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if all_above(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        r0_min = hi;
    }
    let r0 = r0_min + 0.1 * r0_min.max(1.0);

    let margin = |e1: f64| -> Option<f64> {
        let mut m = f64::INFINITY;
        for i in 0..n {
            for s in [1.0 + e1, 1.0 - e1] {
                m = m.min(above(f, sigma, &bumped(&tilde, s, r0, i))?);
            }
        }
        Some(m)
    };
    let mut eps1 = 0.5;
    let mut delta0 = None;
    for _ in 0..60 {
        if let Some(m) = margin(eps1) {
            delta0 = Some(m);
            break;
        }
        eps1 *= 0.5;
    }
    let delta0 = delta0.ok_or_else(|| Error::Numeric("no ε1 keeps (1 ± ε1)μ̃ + R0 e_i above the level".into()))?;
    let epsilon = epsilon_formula(delta, r0, eps1, delta0);
    Ok(DichotomyContext {
        family: f.clone(),
        sigma,
        mu: mu.clone(),
        delta,
        r,
        r0,
        eps1,
        delta0,
        epsilon,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DichotomyCase {
    Case1,
    Case2,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub case: DichotomyCase,
    /// `Σ f_i(μ_i − λ_i) − εW`.
    pub case1_margin: f64,
    /// `min f_i − εW`.
    pub case2_margin: f64,
    /// `W = 1 + Σ f_i + |Σ f_i λ_i|`.
    pub weight: f64,
    /// `Σ f_i λ_i == 0` exactly; the first branch of the sign rule applies.
    pub sign_tie: bool,
}

pub fn dichotomy_check(ctx: &DichotomyContext, lambda: &LambdaTuple) -> Result<DichotomyReport> {
    let f = &ctx.family;
    let value = f.eval(lambda)?;
    let tol = 100.0 * level_tolerance(ctx.sigma);
    if (value - ctx.sigma).abs() > tol {
        return Err(Error::Precondition(format!("f(λ) = {value} is not on the level {}", ctx.sigma)));
    }
    let g = f.grad(lambda)?;
    let gs = g.as_slice();
    let sum: f64 = gs.iter().sum();
    let pairing = g.dot(lambda.as_slice());
    let weight = 1.0 + sum + pairing.abs();
    let target = ctx.epsilon * weight;
    let lhs1: f64 = gs.iter().zip(ctx.mu.as_slice().iter().zip(lambda.as_slice())).map(|(fi, (m, l))| fi * (m - l)).sum();
    let lhs2 = gs.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = 1e-10 * (1.0 + weight);
    let c1 = lhs1 >= target - slack;
    let c2 = lhs2 >= target - slack;
    let case = match (c1, c2) {
        (true, true) => DichotomyCase::Both,
        (true, false) => DichotomyCase::Case1,
        (false, true) => DichotomyCase::Case2,
        (false, false) => {
            return Err(Error::LemmaViolation(format!(
                "neither case holds at λ = {:?}: case 1 margin {:e}, case 2 margin {:e}",
                lambda.as_slice(),
                lhs1 - target,
                lhs2 - target
            )))
        }
    };
    Ok(DichotomyReport { case, case1_margin: lhs1 - target, case2_margin: lhs2 - target, weight, sign_tie: pairing == 0.0 })
}

/// Points of `∂Γ^σ` on `1⃗`-shift lines through Gaussian base points of the
/// given scale.
pub fn sample_level_set(f: &FuncFamily, sigma: f64, count: usize, scale: f64, seed: u64) -> Result<Vec<LambdaTuple>> {
    let mut g = rng(seed);
    let bases: Vec<Vec<f64>> = (0..count).map(|_| (0..f.n).map(|_| scale * gaussian(&mut g)).collect()).collect();
    bases.par_iter().map(|b| LambdaTuple::new(level_on_shift(f, b, sigma)?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lt(v: &[f64]) -> LambdaTuple {
        LambdaTuple::from_slice(v).unwrap()
    }

    #[test]
    fn formula_example() {
        let t = epsilon_terms(0.5, 0.6, 0.25, 0.975);
        let expect = [0.8125, 0.3125, 0.25 / 1.2, 0.39, 0.25, 0.1];
        for (a, b) in t.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(epsilon_formula(0.5, 0.6, 0.25, 0.975), 0.1, epsilon = 1e-12);
        assert_eq!(epsilon_formula(0.5, 0.6, 0.25, 0.0), 0.0);
    }

    #[test]
    fn linear_context() {
        let f = FuncFamily::sigma_root(3, 1).unwrap();
        let ctx = build_context(&f, 3.0, &lt(&[2.0, 2.0, 2.0]), 0.5, 2.0).unwrap();
        assert_abs_diff_eq!(ctx.r0, 0.6, epsilon = 1e-12);
        assert_eq!(ctx.eps1, 0.25);
        assert_abs_diff_eq!(ctx.delta0, 0.975, epsilon = 1e-12);
        assert_abs_diff_eq!(ctx.epsilon, 0.1, epsilon = 1e-12);
        let r = dichotomy_check(&ctx, &lt(&[1.0, 1.0, 1.0])).unwrap();
        assert!(matches!(r.case, DichotomyCase::Case2 | DichotomyCase::Both));
        assert_abs_diff_eq!(r.weight, 7.0, epsilon = 1e-12);
        assert!(r.case2_margin >= 0.3 - 1e-12);
    }

    #[test]
    fn hypothesis_violation() {
        let f = FuncFamily::sigma_root(3, 1).unwrap();
        assert!(matches!(
            build_context(&f, 6.0, &lt(&[2.0, 2.0, 2.0]), 0.5, 2.0),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn rejects_bad_level() {
        let f = FuncFamily::sigma_root(3, 2).unwrap();
        assert!(matches!(build_context(&f, -1.0, &lt(&[2.0, 2.0, 2.0]), 0.5, 9.0), Err(Error::Domain(_))));
    }

    #[test]
    fn logdet_sweep() {
        let f = FuncFamily::log_det(2).unwrap();
        let mu = lt(&[2.0, 2.0]);
        let ctx = build_context(&f, 0.0, &mu, 0.25, 10.0).unwrap();
        assert!(ctx.epsilon > 0.0);
        for p in sample_level_set(&f, 0.0, 200, 3.0, 4).unwrap() {
            dichotomy_check(&ctx, &p).unwrap();
        }
    }

    #[test]
    fn off_level_is_precondition() {
        let f = FuncFamily::log_det(2).unwrap();
        let ctx = build_context(&f, 0.0, &lt(&[2.0, 2.0]), 0.25, 10.0).unwrap();
        assert!(matches!(dichotomy_check(&ctx, &lt(&[2.0, 2.0])), Err(Error::Precondition(_))));
    }
}
