use std::sync::Arc;

use serde::Serialize;

use super::newton::solve_dirichlet;
use super::poisson::unit_poisson;
use super::problem::{Mode, ProblemSpec, SolveOptions, SolveResult};
use crate::error::{Error, Result};
use crate::grid::{DomainKind, GridDomain, NodeKind, ScalarField};

/// Relative slack of the discrete stability bound.
pub const STABILITY_REL: f64 = 1e-6;
pub const STABILITY_ABS: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub label: String,
    /// `sup_∂ |φ¹ − φ²|`.
    pub boundary_gap: f64,
    /// `sup |u¹ − u²|`.
    pub solution_gap: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct DegenerateSweep {
    pub epsilons: Vec<f64>,
    /// Regularization `ρ_ε = ε/2` actually added to `ψ`.
    pub rho: Vec<f64>,
    pub results: Vec<SolveResult>,
    /// `‖u_k − u_{k+1}‖∞`.
    pub cauchy: Vec<f64>,
    pub monotone: bool,
    pub stability: Vec<StabilityReport>,
    /// Set when a regularized solve failed; results up to that point are kept.
    pub aborted: Option<String>,
}

fn boundary_gap(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = a.domain();
    d.nodes_of(NodeKind::Boundary).into_iter().map(|i| (a.get(i) - b.get(i)).abs()).fold(0.0, f64::max)
}

/// Solves with `φ` and with `φ + perturbation` and compares.
pub fn stability_pair(
    spec: &ProblemSpec,
    perturbation: &ScalarField,
    label: &str,
    opts: &SolveOptions,
) -> Result<StabilityReport> {
    let phi = spec.phi()?;
    let phi2 = phi.add(perturbation)?;
    let u1 = solve_dirichlet(spec, opts)?.u;
    let u2 = solve_dirichlet(&spec.with_phi(phi2.clone())?, opts)?.u;
    let bgap = boundary_gap(phi, &phi2);
    let gap = u1.dist(&u2)?;
    Ok(StabilityReport {
        label: label.to_string(),
        boundary_gap: bgap,
        solution_gap: gap,
        ok: gap <= bgap * (1.0 + STABILITY_REL) + STABILITY_ABS,
    })
}

/// `s·cos(2πξ)·cos(πη)` in normalised `S` coordinates; `|·| ≤ s`.
pub fn boundary_profile(domain: &Arc<GridDomain>, s: f64) -> Result<ScalarField> {
    let d = domain.as_ref();
    let a = if d.kind() == DomainKind::ProductXS { d.s_axis() } else { 0 };
    let len = |ax: usize| d.spacing()[ax] * (d.counts()[ax] - usize::from(!d.periodic()[ax])) as f64;
    let (lx, ly) = (len(a), len(a + 1));
    let (ox, oy) = (d.origin()[a], d.origin()[a + 1]);
    ScalarField::from_fn(domain.clone(), |x| {
        s * (2.0 * std::f64::consts::PI * (x[a] - ox) / lx).cos() * (std::f64::consts::PI * (x[a + 1] - oy) / ly).cos()
    })
}

/// Regularized solves `ψ + ε_k/2` along a decreasing ladder, with Cauchy
/// differences and boundary-perturbation stability at the last level.
pub fn degenerate_sweep(spec: &ProblemSpec, ladder: &[f64], shift: f64, opts: &SolveOptions) -> Result<DegenerateSweep> {
    if spec.mode != Mode::Dirichlet {
        return Err(Error::Precondition("degenerate sweeps need Dirichlet mode".into()));
    }
    if !spec.is_degenerate() {
        return Err(Error::Precondition("ψ stays above sup over the cone boundary; the problem is not degenerate".into()));
    }
    if ladder.is_empty() || ladder.iter().any(|&e| !(e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("ε ladder must be positive and strictly decreasing".into()));
    }
    let mut out = DegenerateSweep {
        epsilons: Vec::new(),
        rho: Vec::new(),
        results: Vec::new(),
        cauchy: Vec::new(),
        monotone: true,
        stability: Vec::new(),
        aborted: None,
    };
    let mut last_spec = None;
    for &eps in ladder {
        let rho = 0.5 * eps;
        let reg = spec.with_psi(spec.psi.map(|v| v + rho))?;
        match solve_dirichlet(&reg, opts) {
            Ok(r) => {
                if let Some(prev) = out.results.last() {
                    out.cauchy.push(prev.u.dist(&r.u)?);
                }
                out.epsilons.push(eps);
                out.rho.push(rho);
                out.results.push(r);
                last_spec = Some(reg);
            }
            Err(e) => {
                out.aborted = Some(format!("ε = {eps}: {e}"));
                break;
            }
        }
    }
    out.monotone = out.cauchy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    if let (Some(reg), None) = (last_spec, &out.aborted) {
        let d = &spec.domain;
        for (label, p) in [
            ("constant", ScalarField::constant(d.clone(), shift)),
            ("profile", boundary_profile(d, shift)?),
        ] {
            match stability_pair(&reg, &p, label, opts) {
                Ok(s) => out.stability.push(s),
                Err(e) => {
                    out.aborted = Some(format!("stability pair ({label}): {e}"));
                    break;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExhaustionLevel {
    pub alpha: f64,
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
    pub result: SolveResult,
    /// `sup |u_k − u|` over the sub-domain interior, `u` the full solution.
    pub diff_full: f64,
    /// `sup |u_k − u_{k−1}|` over the previous sub-domain interior.
    pub diff_prev: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub full: SolveResult,
    pub levels: Vec<ExhaustionLevel>,
}

/// Mask of `{h < −α}`: interior where the level holds, boundary on its
/// `3^d` neighbourhood, exterior elsewhere.
pub fn level_mask(h: &ScalarField, alpha: f64) -> Result<Arc<GridDomain>> {
    let d = h.domain();
    let inside: Vec<bool> = (0..d.len()).map(|i| d.node_kind(i) == NodeKind::Interior && h.get(i) < -alpha).collect();
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(Error::Resolution(format!("sub-domain {{h < −{alpha}}} is empty")));
    }
    for a in 0..d.dim() {
        if d.periodic()[a] {
            continue;
        }
        let mut seen = vec![false; d.counts()[a]];
        for i in (0..d.len()).filter(|&i| inside[i]) {
            seen[d.axis_index(i, a)] = true;
        }
        let across = seen.iter().filter(|&&s| s).count();
        if across < 3 {
            return Err(Error::Resolution(format!("sub-domain {{h < −{alpha}}} is {across} nodes across on axis {a}")));
        }
    }
    let mut mask = vec![NodeKind::Exterior; d.len()];
    let dim = d.dim();
    for i in (0..d.len()).filter(|&i| inside[i]) {
        mask[i] = NodeKind::Interior;
        // every node within one step on each axis
        let mut stack = vec![i];
        for a in 0..dim {
            let mut next = Vec::with_capacity(stack.len() * 3);
            for &j in &stack {
                next.push(j);
                next.extend(d.neighbor(j, a, 1));
                next.extend(d.neighbor(j, a, -1));
            }
            stack = next;
        }
        for j in stack {
            if !inside[j] {
                mask[j] = NodeKind::Boundary;
            }
        }
    }
    Ok(Arc::new(d.with_mask(mask)?))
}

/// Solves on the nested sub-domains `{h < −α_k}` and compares with the
/// full solve.
pub fn domain_exhaustion(spec: &ProblemSpec, alphas: &[f64], opts: &SolveOptions) -> Result<ExhaustionReport> {
    if spec.mode != Mode::Dirichlet || spec.domain.kind() != DomainKind::ProductXS {
        return Err(Error::Precondition("exhaustion needs a Dirichlet problem on X × S".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0)) || alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("α ladder must be positive and strictly decreasing".into()));
    }
    let h = unit_poisson(&spec.domain)?;
    let masks = alphas.iter().map(|&a| level_mask(&h, a)).collect::<Result<Vec<_>>>()?;
    let full = solve_dirichlet(spec, opts)?;
    let mut levels: Vec<ExhaustionLevel> = Vec::new();
    for (&alpha, mask) in alphas.iter().zip(masks) {
        let sub = spec.restricted(mask.clone())?;
        let result = solve_dirichlet(&sub, opts)?;
        let interior = mask.nodes_of(NodeKind::Interior);
        let diff = |other: &ScalarField, nodes: &[usize]| {
            nodes.iter().map(|&i| (result.u.get(i) - other.get(i)).abs()).fold(0.0, f64::max)
        };
        let diff_full = diff(&full.u, &interior);
        let diff_prev = levels.last().map(|p| {
            let prev_interior = p.result.u.domain().nodes_of(NodeKind::Interior);
            diff(&p.result.u, &prev_interior)
        });
        levels.push(ExhaustionLevel {
            alpha,
            interior_nodes: interior.len(),
            boundary_nodes: mask.nodes_of(NodeKind::Boundary).len(),
            result,
            diff_full,
            diff_prev,
        });
    }
    Ok(ExhaustionReport { full, levels })
}
