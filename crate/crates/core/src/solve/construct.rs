use rayon::prelude::*;

use super::poisson::{poisson_dirichlet, unit_poisson};
use super::problem::{Mode, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{complex_hessian_at, DomainKind, NodeKind, ScalarField};
use crate::spectra::{eigh, HermitianMatrix};

/// `t = 0` followed by `2^k / 1024`, `k = 0..=40`.
pub fn subsolution_ladder() -> Vec<f64> {
    std::iter::once(0.0).chain((0..=40).map(|k| 2f64.powi(k) / 1024.0)).collect()
}

/// `u̲ = φ + t·h` with `Δh = 1`, `h|∂ = 0`, for the smallest ladder `t` with
/// `λ(g[u̲]) ∈ Γ` and `f(λ(g[u̲])) ≥ ψ + δ` at every interior node.
pub fn build_subsolution(spec: &ProblemSpec, delta: f64) -> Result<(ScalarField, f64)> {
    if spec.mode != Mode::Dirichlet || spec.domain.kind() != DomainKind::ProductXS {
        return Err(Error::Precondition("subsolution construction needs a Dirichlet problem on X × S".into()));
    }
    let d = &spec.domain;
    let phi = spec.phi()?;
    let h = unit_poisson(d)?;
    let nodes = d.nodes_of(NodeKind::Interior);
    let parts = nodes
        .par_iter()
        .map(|&i| Ok((spec.chi.get(i).add(&complex_hessian_at(phi, i)?), complex_hessian_at(&h, i)?)))
        .collect::<Result<Vec<(HermitianMatrix, HermitianMatrix)>>>()?;
    let f = &spec.family;
    // smallest margin f − ψ − δ over interior nodes (−∞ outside the cone)
    let margin = |t: f64| -> Result<(f64, usize)> {
        let per = parts
            .par_iter()
            .zip(nodes.par_iter())
            .map(|((g0, hh), &i)| {
                let e = eigh(&g0.add(&hh.scale(t)))?;
                let m = if f.admits(&e.values) {
                    f.eval_slice(&e.values)? - spec.psi.get(i) - delta
                } else {
                    f64::NEG_INFINITY
                };
                Ok((m, i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(per.into_iter().fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a }))
    };
    let mut last = (f64::NEG_INFINITY, usize::MAX);
    for t in subsolution_ladder() {
        last = margin(t)?;
        if last.0 >= 0.0 {
            return Ok((phi.axpy(t, &h)?, t));
        }
    }
    let (m, node) = last;
    let at = if node == usize::MAX { Vec::new() } else { d.coords(node) };
    Err(Error::Construction(format!(
        "no ladder t makes φ + t·h a strict subsolution; at t = 2^40/1024 node {node} at {at:?} has margin {m}"
    )))
}

/// `ǔ` with `Δǔ + tr χ = 0`, `ǔ = φ` on the boundary.
pub fn build_supersolution(spec: &ProblemSpec) -> Result<ScalarField> {
    if spec.mode != Mode::Dirichlet {
        return Err(Error::Precondition("supersolution construction needs Dirichlet mode".into()));
    }
    let rhs = spec.chi.trace().map(|v| -v);
    poisson_dirichlet(&spec.domain, &rhs, spec.phi()?)
}
