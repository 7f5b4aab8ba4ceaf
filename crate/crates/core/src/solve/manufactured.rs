use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{complex_from_real, DomainKind, GridDomain, HermitianField, ScalarField};
use crate::spectra::eigh;
use crate::symfunc::FuncFamily;

/// A smooth exact solution with its analytic complex Hessian.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub exact: ScalarField,
    pub hessian: HermitianField,
}

/// Value and real Hessian (row-major, `2n × 2n`) at a point.
fn profile(d: &GridDomain, amp: f64, x: &[f64]) -> (f64, Vec<f64>) {
    let dim = d.dim();
    let mut hess = vec![0.0; dim * dim];
    let lengths: Vec<f64> = (0..dim)
        .map(|a| {
            let cells = if d.periodic()[a] { d.counts()[a] } else { d.counts()[a] - 1 };
            d.spacing()[a] * cells as f64
        })
        .collect();
    match d.kind() {
        DomainKind::Torus => {
            // plane waves A sin(k·x + θ) coupling neighbouring axes
            let a_m = amp / dim as f64;
            let mut value = 0.0;
            for m in 0..dim {
                let m2 = (m + 1) % dim;
                let mut k = vec![0.0; dim];
                k[m] += 2.0 * PI / lengths[m];
                k[m2] += 2.0 * PI / lengths[m2];
                let phase: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + 0.3 * m as f64;
                value += a_m * phase.sin();
                for p in 0..dim {
                    for q in 0..dim {
                        hess[p * dim + q] -= a_m * k[p] * k[q] * phase.sin();
                    }
                }
            }
            (value, hess)
        }
        DomainKind::ProductXS => {
            let s = d.s_axis();
            let (lx, ly) = (lengths[s], lengths[s + 1]);
            let xi = (x[s] - d.origin()[s]) / lx;
            let eta = (x[s + 1] - d.origin()[s + 1]) / ly;
            let (v, uxx, uyy, uxy) = match (d.periodic()[s], d.periodic()[s + 1]) {
                (false, false) => {
                    let (sx, sy, cx, cy) = ((PI * xi).sin(), (PI * eta).sin(), (PI * xi).cos(), (PI * eta).cos());
                    (
                        sx * sy + xi * eta * eta,
                        -PI * PI * sx * sy / (lx * lx),
                        (-PI * PI * sx * sy + 2.0 * xi) / (ly * ly),
                        (PI * PI * cx * cy + 2.0 * eta) / (lx * ly),
                    )
                }
                (false, true) => {
                    let (sx, cx, sy, cy) = ((PI * xi).sin(), (PI * xi).cos(), (2.0 * PI * eta).sin(), (2.0 * PI * eta).cos());
                    (sx * cy, -PI * PI * sx * cy / (lx * lx), -4.0 * PI * PI * sx * cy / (ly * ly), -2.0 * PI * PI * cx * sy / (lx * ly))
                }
                _ => {
                    let (sx, cx, sy, cy) = ((2.0 * PI * xi).sin(), (2.0 * PI * xi).cos(), (PI * eta).sin(), (PI * eta).cos());
                    (cx * sy, -4.0 * PI * PI * cx * sy / (lx * lx), -PI * PI * cx * sy / (ly * ly), -2.0 * PI * PI * sx * cy / (lx * ly))
                }
            };
            hess[s * dim + s] = amp * uxx;
            hess[(s + 1) * dim + s + 1] = amp * uyy;
            hess[s * dim + s + 1] = amp * uxy;
            hess[(s + 1) * dim + s] = amp * uxy;
            (amp * v, hess)
        }
    }
}

/// On a torus: a sum of plane waves. On `X × S`: an `X`-independent
/// function of the `S` coordinates (`A(sin πξ sin πη + ξη²)` on a
/// rectangle, normalised coordinates).
pub fn manufactured(domain: &Arc<GridDomain>, amplitude: f64) -> Result<Manufactured> {
    let d = domain.as_ref();
    let (vals, mats): (Vec<f64>, Vec<_>) = (0..d.len())
        .into_par_iter()
        .map(|i| {
            let (v, r) = profile(d, amplitude, &d.coords(i));
            (v, complex_from_real(d.n(), &r))
        })
        .unzip();
    Ok(Manufactured { exact: ScalarField::new(domain.clone(), vals)?, hessian: HermitianField::new(domain.clone(), mats)? })
}

/// `ψ = f(λ(χ + i∂∂̄u*))` from the analytic Hessian.
pub fn manufactured_psi(family: &FuncFamily, chi: &HermitianField, m: &Manufactured) -> Result<ScalarField> {
    let d = m.exact.domain();
    let vals = (0..d.len())
        .into_par_iter()
        .map(|i| {
            let e = eigh(&chi.get(i).add(m.hessian.get(i)))?;
            if !family.admits(&e.values) {
                return Err(Error::Inadmissible(format!("manufactured solution leaves the cone at node {i}")));
            }
            family.eval_slice(&e.values)
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(d.clone(), vals)
}

/// `scale · |z − z₀|` over the bounded factor (`S` on products, every axis
/// on a torus), `z₀` its centre.
pub fn bowl(domain: &Arc<GridDomain>, scale: f64) -> Result<ScalarField> {
    let d = domain.as_ref();
    let axes: Vec<usize> = match d.kind() {
        DomainKind::ProductXS => vec![d.s_axis(), d.s_axis() + 1],
        DomainKind::Torus => (0..d.dim()).collect(),
    };
    let centre: Vec<f64> = (0..d.dim())
        .map(|a| {
            let cells = if d.periodic()[a] { d.counts()[a] } else { d.counts()[a] - 1 };
            d.origin()[a] + 0.5 * d.spacing()[a] * cells as f64
        })
        .collect();
    ScalarField::from_fn(domain.clone(), |x| scale * axes.iter().map(|&a| (x[a] - centre[a]).powi(2)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{complex_hessian, NodeKind, SFactor};

    fn max_hessian_error(d: &Arc<GridDomain>) -> f64 {
        let m = manufactured(d, 0.7).unwrap();
        let h = complex_hessian(&m.exact).unwrap();
        let mut worst: f64 = 0.0;
        for i in d.nodes_of(NodeKind::Interior) {
            worst = worst.max(h.get(i).sub(m.hessian.get(i)).frobenius());
        }
        worst
    }

    #[test]
    fn torus_hessian_is_second_order() {
        let e1 = max_hessian_error(&Arc::new(GridDomain::cubic_torus(2, 8).unwrap()));
        let e2 = max_hessian_error(&Arc::new(GridDomain::cubic_torus(2, 16).unwrap()));
        assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn product_hessian_is_second_order() {
        for s in [SFactor::unit_square(16), SFactor::annulus(16, 1.0, 2.0, 16)] {
            let coarse = Arc::new(GridDomain::product_uniform(2, 4, &s).unwrap());
            let mut fine_s = s.clone();
            fine_s.cells = [s.cells[0] * 2, s.cells[1] * 2];
            let fine = Arc::new(GridDomain::product_uniform(2, 4, &fine_s).unwrap());
            let (e1, e2) = (max_hessian_error(&coarse), max_hessian_error(&fine));
            assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
        }
    }

    #[test]
    fn bowl_vanishes_at_centre() {
        let d = Arc::new(GridDomain::product_uniform(2, 4, &SFactor::unit_square(4)).unwrap());
        let b = bowl(&d, 2.0).unwrap();
        assert_eq!(b.min(), 0.0);
        assert!((b.max() - 2f64.sqrt()).abs() < 1e-12);
    }
}
