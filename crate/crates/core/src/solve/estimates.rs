use serde::Serialize;

use super::problem::ProblemSpec;
use crate::error::Result;
use crate::grid::{complex_hessian_at, gradient_sup, inward_normal_derivative, NodeKind, ScalarField};

pub const SANDWICH_SLACK: f64 = 1e-8;
pub const NORMAL_SLACK: f64 = 1e-6;

/// Quantities entering the a priori estimates, for inspection.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EstimateReport {
    /// `sup |∂∂̄u|` (Frobenius) over interior nodes.
    pub sup_dbar: f64,
    /// `sup |∇u|²`.
    pub grad_sq: f64,
    pub ratio2nd: f64,
    pub sandwich_ok: bool,
    pub sandwich_violations: usize,
    /// Largest of `u̲ − u` and `u − ǔ`.
    pub sandwich_worst: f64,
    pub normal_order_ok: bool,
    pub normal_violations: usize,
    /// `max Re g_{nn̄} / (1 + Σ_α |g_{αn̄}|²)` over boundary nodes, `n` the
    /// normal direction.
    pub bdry_ratio: f64,
}

pub fn verify_estimates(
    u: &ScalarField,
    spec: &ProblemSpec,
    sub: Option<&ScalarField>,
    sup: Option<&ScalarField>,
) -> Result<EstimateReport> {
    let d = &spec.domain;
    let mut r = EstimateReport { grad_sq: gradient_sup(u)?, sandwich_ok: true, normal_order_ok: true, ..Default::default() };
    for i in d.nodes_of(NodeKind::Interior) {
        let m = complex_hessian_at(u, i)?;
        r.sup_dbar = r.sup_dbar.max(m.frobenius());
    }
    r.ratio2nd = r.sup_dbar / (1.0 + r.grad_sq);

    let mut worst = f64::NEG_INFINITY;
    for i in 0..d.len() {
        if d.node_kind(i) == NodeKind::Exterior {
            continue;
        }
        if let Some(s) = sub {
            worst = worst.max(s.get(i) - u.get(i));
        }
        if let Some(s) = sup {
            worst = worst.max(u.get(i) - s.get(i));
        }
    }
    if worst.is_finite() {
        r.sandwich_worst = worst;
        r.sandwich_violations = (0..d.len())
            .filter(|&i| d.node_kind(i) != NodeKind::Exterior)
            .filter(|&i| {
                sub.is_some_and(|s| s.get(i) - u.get(i) > SANDWICH_SLACK)
                    || sup.is_some_and(|s| u.get(i) - s.get(i) > SANDWICH_SLACK)
            })
            .count();
        r.sandwich_ok = r.sandwich_violations == 0;
    }

    let mut bdry = f64::NEG_INFINITY;
    for i in d.nodes_of(NodeKind::Boundary) {
        let Some((axis, du)) = inward_normal_derivative(u, i) else { continue };
        let lo = sub.and_then(|s| inward_normal_derivative(s, i)).map(|x| x.1);
        let hi = sup.and_then(|s| inward_normal_derivative(s, i)).map(|x| x.1);
        let slack = NORMAL_SLACK * (1.0 + du.abs() + lo.map_or(0.0, f64::abs) + hi.map_or(0.0, f64::abs));
        if lo.is_some_and(|l| l > du + slack) || hi.is_some_and(|h| du > h + slack) {
            r.normal_violations += 1;
        }
        let g = spec.chi.get(i).add(&complex_hessian_at(u, i)?);
        let nc = axis / 2;
        let off: f64 = (0..d.n()).filter(|&a| a != nc).map(|a| g.get(a, nc).norm_sqr()).sum();
        bdry = bdry.max(g.get(nc, nc).re / (1.0 + off));
    }
    r.normal_order_ok = r.normal_violations == 0;
    r.bdry_ratio = if bdry.is_finite() { bdry } else { 0.0 };
    Ok(r)
}
