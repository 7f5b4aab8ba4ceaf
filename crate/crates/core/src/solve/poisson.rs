use std::sync::Arc;

use super::linalg::{cg, CsrMatrix};
use crate::error::{Error, Result};
use crate::grid::{chern_laplacian, GridDomain, NodeKind, ScalarField};

/// Position of each interior node among the unknowns.
pub(crate) fn interior_map(d: &GridDomain) -> (Vec<usize>, Vec<Option<usize>>) {
    let nodes = d.nodes_of(NodeKind::Interior);
    let mut map = vec![None; d.len()];
    for (k, &i) in nodes.iter().enumerate() {
        map[i] = Some(k);
    }
    (nodes, map)
}

/// Solves `Δ h = rhs` (Chern Laplacian) on interior nodes with `h = bc` on
/// boundary nodes, by CG on the SPD system for `−Δ`.
pub fn poisson_dirichlet(domain: &Arc<GridDomain>, rhs: &ScalarField, bc: &ScalarField) -> Result<ScalarField> {
    let d = domain.as_ref();
    if !d.has_boundary() {
        return Err(Error::Precondition("Poisson solve needs a grid with boundary nodes".into()));
    }
    if !rhs.domain().same_geometry(d) || !bc.domain().same_geometry(d) {
        return Err(Error::Domain("rhs and boundary data must live on the grid".into()));
    }
    let (nodes, map) = interior_map(d);
    let h = d.spacing();
    let mut rows = Vec::with_capacity(nodes.len());
    let mut b = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let mut row = Vec::with_capacity(2 * d.dim() + 1);
        let mut bi = -rhs.get(i);
        for a in 0..d.dim() {
            let w = 0.25 / (h[a] * h[a]);
            row.push((map[i].expect("interior"), 2.0 * w));
            for step in [-1, 1] {
                let j = d.neighbor(i, a, step).ok_or_else(|| Error::Stencil(format!("node {i} has no neighbor on axis {a}")))?;
                match (d.node_kind(j), map[j]) {
                    (_, Some(k)) => row.push((k, -w)),
                    (NodeKind::Boundary, None) => bi += w * bc.get(j),
                    _ => return Err(Error::Stencil(format!("interior node {i} touches exterior node {j}"))),
                }
            }
        }
        rows.push(row);
        b.push(bi);
    }
    let a = CsrMatrix::from_rows(nodes.len(), rows);
    let mut x = vec![0.0; nodes.len()];
    let stats = cg(&a, &b, &mut x, 1e-13, 20 * nodes.len() + 1000);
    let mut values = bc.values().to_vec();
    for (k, &i) in nodes.iter().enumerate() {
        values[i] = x[k];
    }
    let out = ScalarField::new(domain.clone(), values)?;
    let lap = chern_laplacian(&out)?;
    let res = nodes.iter().map(|&i| (lap.get(i) - rhs.get(i)).abs()).fold(0.0, f64::max);
    // evaluating the stencil in floating point loses about ε·diag·|h|
    let diag: f64 = h.iter().map(|s| 0.5 / (s * s)).sum();
    let bound = 1e-10 * (1.0 + rhs.max_abs()) + 64.0 * f64::EPSILON * diag * out.max_abs();
    if res > bound {
        return Err(Error::Numeric(format!(
            "Poisson residual {res:e} exceeds {bound:e} (CG: {} iterations, relative residual {:e})",
            stats.iterations, stats.relative_residual
        )));
    }
    Ok(out)
}

/// `Δ h = 1`, `h = 0` on the boundary.
pub fn unit_poisson(domain: &Arc<GridDomain>) -> Result<ScalarField> {
    poisson_dirichlet(domain, &ScalarField::constant(domain.clone(), 1.0), &ScalarField::zeros(domain.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inward_normal_derivative, SFactor};

    #[test]
    fn zero_data_gives_zero() {
        let d = Arc::new(GridDomain::product(1, &[], &[], &SFactor::unit_square(8)).unwrap());
        let z = ScalarField::zeros(d.clone());
        assert_eq!(poisson_dirichlet(&d, &z, &z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn maximum_principle() {
        let d = Arc::new(GridDomain::product_uniform(2, 4, &SFactor::unit_square(8)).unwrap());
        let h = unit_poisson(&d).unwrap();
        for i in d.nodes_of(NodeKind::Interior) {
            assert!(h.get(i) < 0.0);
        }
        for i in d.nodes_of(NodeKind::Boundary) {
            let (_, dn) = inward_normal_derivative(&h, i).unwrap();
            assert!(dn <= 0.0);
        }
    }

    #[test]
    fn torus_is_rejected() {
        let d = Arc::new(GridDomain::cubic_torus(1, 4).unwrap());
        let z = ScalarField::zeros(d.clone());
        assert!(matches!(poisson_dirichlet(&d, &z, &z), Err(Error::Precondition(_))));
    }
}
