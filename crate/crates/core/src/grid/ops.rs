use num_complex::Complex64;
use rayon::prelude::*;

use super::domain::{GridDomain, NodeKind};
use super::field::{HermitianField, ScalarField};
use crate::error::{Error, Result};
use crate::spectra::HermitianMatrix;

/// Value at `base + off`, wrapping periodic axes and filling the ghost layer
/// of bounded axes by quadratic extrapolation `v₋₁ = 3v₀ − 3v₁ + v₂`.
fn sample(d: &GridDomain, vals: &[f64], base: &[usize], off: &mut [isize]) -> Result<f64> {
    let counts = d.counts();
    let strides = d.strides();
    let mut idx = 0usize;
    for a in 0..base.len() {
        let m = counts[a] as isize;
        let j = base[a] as isize + off[a];
        if d.periodic()[a] {
            idx += j.rem_euclid(m) as usize * strides[a];
        } else if j < 0 || j >= m {
            if m < 3 || j < -1 || j > m {
                return Err(Error::Stencil(format!("stencil leaves bounded axis {a} beyond the ghost layer")));
            }
            let (edge, inward) = if j < 0 { (0, 1) } else { (m - 1, -1) };
            let saved = off[a];
            let mut at = |k: isize| -> Result<f64> {
                off[a] = edge + k * inward - base[a] as isize;
                sample(d, vals, base, off)
            };
            let v = 3.0 * at(0)? - 3.0 * at(1)? + at(2)?;
            off[a] = saved;
            return Ok(v);
        } else {
            idx += j as usize * strides[a];
        }
    }
    Ok(vals[idx])
}

/// Real Hessian `(D_ab u)` at a node, `2n × 2n` row-major, second-order
/// centered differences.
pub fn real_hessian_at(u: &ScalarField, idx: usize) -> Result<Vec<f64>> {
    let d = u.domain();
    let dim = d.dim();
    let h = d.spacing();
    let vals = u.values();
    let base = d.multi_index(idx);
    let mut off = vec![0isize; dim];
    let mut r = vec![0.0; dim * dim];
    let center = vals[idx];
    for a in 0..dim {
        off[a] = 1;
        let p = sample(d, vals, &base, &mut off)?;
        off[a] = -1;
        let m = sample(d, vals, &base, &mut off)?;
        off[a] = 0;
        r[a * dim + a] = (p - 2.0 * center + m) / (h[a] * h[a]);
        for b in (a + 1)..dim {
            let mut corner = |sa: isize, sb: isize| -> Result<f64> {
                off[a] = sa;
                off[b] = sb;
                let v = sample(d, vals, &base, &mut off);
                off[a] = 0;
                off[b] = 0;
                v
            };
            let v = (corner(1, 1)? - corner(1, -1)? - corner(-1, 1)? + corner(-1, -1)?) / (4.0 * h[a] * h[b]);
            r[a * dim + b] = v;
            r[b * dim + a] = v;
        }
    }
    Ok(r)
}

/// `u_{jk̄} = ¼(R[xj][xk] + R[yj][yk]) + (i/4)(R[xj][yk] − R[yj][xk])`.
pub fn complex_from_real(n: usize, r: &[f64]) -> HermitianMatrix {
    let dim = 2 * n;
    let mut m = HermitianMatrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let re = 0.25 * (r[xj * dim + xk] + r[yj * dim + yk]);
            let im = 0.25 * (r[xj * dim + yk] - r[yj * dim + xk]);
            m.set(j, k, Complex64::new(re, im));
        }
    }
    m
}

pub fn complex_hessian_at(u: &ScalarField, idx: usize) -> Result<HermitianMatrix> {
    Ok(complex_from_real(u.domain().n(), &real_hessian_at(u, idx)?))
}

/// Complex Hessian at every node (zero on exterior nodes).
pub fn complex_hessian(u: &ScalarField) -> Result<HermitianField> {
    let d = u.domain();
    let mats = (0..d.len())
        .into_par_iter()
        .map(|i| {
            if d.node_kind(i) == NodeKind::Exterior {
                Ok(HermitianMatrix::zeros(d.n()))
            } else {
                complex_hessian_at(u, i)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    HermitianField::new(d.clone(), mats)
}

/// `Σ_j u_{jj̄}`, a quarter of the Euclidean Laplacian.
pub fn chern_laplacian(u: &ScalarField) -> Result<ScalarField> {
    let d = u.domain();
    let h = d.spacing();
    let vals = u.values();
    let out = (0..d.len())
        .into_par_iter()
        .map(|i| {
            if d.node_kind(i) == NodeKind::Exterior {
                return Ok(0.0);
            }
            let base = d.multi_index(i);
            let mut off = vec![0isize; d.dim()];
            let mut s = 0.0;
            for a in 0..d.dim() {
                off[a] = 1;
                let p = sample(d, vals, &base, &mut off)?;
                off[a] = -1;
                let m = sample(d, vals, &base, &mut off)?;
                off[a] = 0;
                s += (p - 2.0 * vals[i] + m) / (h[a] * h[a]);
            }
            Ok(0.25 * s)
        })
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(d.clone(), out)
}

/// Centered gradient; one-sided second order on bounded edges.
pub fn gradient_at(u: &ScalarField, idx: usize) -> Result<Vec<f64>> {
    let d = u.domain();
    let base = d.multi_index(idx);
    let mut off = vec![0isize; d.dim()];
    (0..d.dim())
        .map(|a| {
            off[a] = 1;
            let p = sample(d, u.values(), &base, &mut off)?;
            off[a] = -1;
            let m = sample(d, u.values(), &base, &mut off)?;
            off[a] = 0;
            Ok((p - m) / (2.0 * d.spacing()[a]))
        })
        .collect()
}

/// `sup |∇u|²` over non-exterior nodes.
pub fn gradient_sup(u: &ScalarField) -> Result<f64> {
    let d = u.domain();
    let sq = (0..d.len())
        .into_par_iter()
        .filter(|&i| d.node_kind(i) != NodeKind::Exterior)
        .map(|i| Ok(gradient_at(u, i)?.iter().map(|g| g * g).sum::<f64>()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(sq.into_iter().fold(0.0, f64::max))
}

/// Inward derivative `(−3v₀ + 4v₁ − v₂)/(2h)` across the first bounded
/// axis on which the node sits at an edge, with that axis.
pub fn inward_normal_derivative(u: &ScalarField, idx: usize) -> Option<(usize, f64)> {
    let d = u.domain();
    for a in 0..d.dim() {
        if d.periodic()[a] || d.counts()[a] < 3 {
            continue;
        }
        let i = d.axis_index(idx, a);
        let step = if i == 0 {
            1
        } else if i + 1 == d.counts()[a] {
            -1
        } else {
            continue;
        };
        let v1 = u.get(d.neighbor(idx, a, step)?);
        let v2 = u.get(d.neighbor(idx, a, 2 * step)?);
        return Some((a, (-3.0 * u.get(idx) + 4.0 * v1 - v2) / (2.0 * d.spacing()[a])));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SFactor;
    use std::sync::Arc;

    fn plane(cells: usize) -> Arc<GridDomain> {
        Arc::new(GridDomain::product(1, &[], &[], &SFactor::unit_square(cells)).unwrap())
    }

    #[test]
    fn constant_and_quadratics() {
        let d = plane(6);
        let c = ScalarField::constant(d.clone(), 3.0);
        assert_eq!(complex_hessian(&c).unwrap().trace().max_abs(), 0.0);
        let q = ScalarField::from_fn(d.clone(), |x| x[0] * x[0] + x[1] * x[1]).unwrap();
        let l = chern_laplacian(&q).unwrap();
        for v in l.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let saddle = ScalarField::from_fn(d, |x| x[0] * x[0] - x[1] * x[1]).unwrap();
        assert!(chern_laplacian(&saddle).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn torus_patch_modulus() {
        let d = Arc::new(GridDomain::product(2, &[4, 4], &[1.0, 1.0], &SFactor::unit_square(4)).unwrap());
        // |z¹|² is not periodic on X, so evaluate away from the wrap seam
        let u = ScalarField::from_fn(d.clone(), |x| x[0] * x[0] + x[1] * x[1]).unwrap();
        let idx = d.index(&[1, 2, 2, 2]);
        let m = complex_hessian_at(&u, idx).unwrap();
        assert!((m.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(m.get(0, 1).norm() < 1e-12 && m.get(1, 1).re.abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let d = plane(8);
        assert_eq!(gradient_sup(&ScalarField::zeros(d.clone())).unwrap(), 0.0);
        let x = ScalarField::from_fn(d.clone(), |p| p[0]).unwrap();
        assert!((gradient_sup(&x).unwrap() - 1.0).abs() < 1e-12);
        let corner = d.index(&[0, 3]);
        let (axis, dn) = inward_normal_derivative(&x, corner).unwrap();
        assert_eq!(axis, 0);
        assert!((dn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thin_axis_is_stencil_error() {
        let d = Arc::new(GridDomain::product(1, &[], &[], &SFactor::rectangle([1, 4], [1.0, 1.0])).unwrap());
        assert!(matches!(chern_laplacian(&ScalarField::zeros(d)), Err(Error::Stencil(_))));
    }
}
