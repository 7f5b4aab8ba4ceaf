use super::{cone_margin, elementary, FamilyKind, FuncFamily, LambdaTuple};
use crate::error::{Error, Result};
use crate::sampling;

/// How a `Γ_G^f` verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaGMethod {
    Analytic,
    Numeric,
}

/// Membership of a point in `Γ` and in `Γ_G^f = {λ ∈ Γ : lim f(tλ) > -∞}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeVerdict {
    pub in_gamma: bool,
    pub in_gamma_g: bool,
    /// `min_{j≤k} σ_j(λ)`.
    pub margin: f64,
    /// Set when the numeric criteria disagree within tolerance.
    pub indeterminate: bool,
    pub method: GammaGMethod,
}

/// The three numerically checkable criteria for `μ ∈ Γ_G^f`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaGCriteria {
    /// `t ↦ f(tμ)` has nonnegative increments at the top of the ladder.
    pub ladder_bounded: bool,
    /// Secant estimate of `limsup f(tμ)/t` is `≥ 0`.
    pub slope_nonnegative: bool,
    /// `Σ f_i(λ) μ_i ≥ 0` for every probed `λ ∈ Γ`.
    pub pairing_nonnegative: bool,
    pub slope_estimate: f64,
    pub min_pairing: f64,
}

impl GammaGCriteria {
    pub fn agree(&self) -> bool {
        self.ladder_bounded == self.slope_nonnegative && self.slope_nonnegative == self.pairing_nonnegative
    }
}

pub const DEFAULT_T_MAX: f64 = 1048576.0; // 2^20

fn ladder(t_max: f64) -> Vec<f64> {
    let mut ts = vec![1.0];
    while *ts.last().unwrap() * 2.0 <= t_max * (1.0 + 1e-12) {
        let next = ts.last().unwrap() * 2.0;
        ts.push(next);
    }
    ts
}

/// `Γ_G^f` membership, decided analytically for every supported family:
/// the homogeneous and logarithmic families have `Γ_G^f = Γ`, while the
/// mixed family needs `σ_{k+1}(λ) ≥ 0` (the quotient term is linear in `t`
/// and dominates the logarithms).
pub fn in_gamma_g(f: &FuncFamily, lambda: &LambdaTuple, t_max: f64) -> Result<ConeVerdict> {
    if !(t_max > 1.0) {
        return Err(Error::Domain(format!("t_max must exceed 1, got {t_max}")));
    }
    let k = f.cone_index();
    let margin = cone_margin(lambda.as_slice(), k);
    let in_gamma = margin > 0.0 && lambda.len() == f.n;
    let in_gamma_g = in_gamma
        && match &f.kind {
            FamilyKind::GuanMixed { k, .. } => {
                *k >= f.n || elementary(lambda.as_slice(), *k + 1)[*k + 1] >= 0.0
            }
            _ => true,
        };
    Ok(ConeVerdict { in_gamma, in_gamma_g, margin, indeterminate: false, method: GammaGMethod::Analytic })
}

/// Evaluates the equivalent criteria (limit along the ray, asymptotic slope,
/// pairing with gradients) on a geometric ladder `t ∈ {1, 2, 4, …, t_max}`.
/// Pairing probes are the ladder points `tμ` plus `probes` seeded samples of `Γ`.
pub fn gamma_g_criteria(
    f: &FuncFamily,
    mu: &LambdaTuple,
    t_max: f64,
    probes: usize,
    seed: u64,
) -> Result<GammaGCriteria> {
    if !f.admits(mu.as_slice()) {
        return Err(Error::Inadmissible(format!("μ = {:?} outside the cone", mu.as_slice())));
    }
    if !(t_max >= 4.0) {
        return Err(Error::Domain(format!("t_max must be at least 4, got {t_max}")));
    }
    let f0 = f.eval(mu)?;
    let tol = 1e-9 * (1.0 + f0.abs());
    let ts = ladder(t_max);
    let values: Vec<f64> = ts
        .iter()
        .map(|t| f.eval(&mu.scaled(*t)))
        .collect::<Result<_>>()?;
    let m = values.len();
    let last_increment = values[m - 1] - values[m - 2];
    let ladder_bounded = last_increment >= -tol;
    let half = ts[m - 1] - ts[m - 2];
    let slope_estimate = last_increment / half;
    let slope_nonnegative = slope_estimate >= -tol / half;

    let mut min_pairing = f64::INFINITY;
    let mut record = |lambda: &[f64]| -> Result<()> {
        let g = f.grad_slice(lambda)?;
        min_pairing = min_pairing.min(mu.dot(&g));
        Ok(())
    };
    for t in &ts {
        record(mu.scaled(*t).as_slice())?;
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..probes {
        let p = sampling::sample_cone(&mut rng, f.n, f.cone_index(), 0.9);
        record(&p)?;
    }
    let pairing_nonnegative = min_pairing >= -tol;
    Ok(GammaGCriteria {
        ladder_bounded,
        slope_nonnegative,
        pairing_nonnegative,
        slope_estimate,
        min_pairing,
    })
}

/// Numeric `Γ_G^f` verdict from [`gamma_g_criteria`]; flagged indeterminate
/// when the criteria conflict.
pub fn in_gamma_g_numeric(f: &FuncFamily, mu: &LambdaTuple, t_max: f64, seed: u64) -> Result<ConeVerdict> {
    let margin = cone_margin(mu.as_slice(), f.cone_index());
    if !(margin > 0.0) {
        return Ok(ConeVerdict {
            in_gamma: false,
            in_gamma_g: false,
            margin,
            indeterminate: false,
            method: GammaGMethod::Numeric,
        });
    }
    let c = gamma_g_criteria(f, mu, t_max, 16, seed)?;
    Ok(ConeVerdict {
        in_gamma: true,
        in_gamma_g: c.ladder_bounded && c.pairing_nonnegative,
        margin,
        indeterminate: !c.agree(),
        method: GammaGMethod::Numeric,
    })
}
