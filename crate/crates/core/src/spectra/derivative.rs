use super::hermitian::{eigh, HermitianMatrix};
use crate::error::{Error, Result};
use crate::symfunc::FuncFamily;

/// `F^{ij̄} = Σ_k f_k(λ) P_ik conj(P_jk)`.
pub fn matrix_derivative(f: &FuncFamily, g: &HermitianMatrix) -> Result<HermitianMatrix> {
    if g.dim() != f.n {
        return Err(Error::Domain(format!("matrix is {}×{} but family has n = {}", g.dim(), g.dim(), f.n)));
    }
    let e = eigh(g)?;
    let grad = f.grad_slice(&e.values)?;
    Ok(HermitianMatrix::from_eigenframe(&e.vectors, &grad))
}

/// `tr(F(G)·(G̲−G)) − Σ f_i(λ)(λ̲_i − λ_i)` with both spectra ascending.
/// Nonnegative up to rounding for concave symmetric `f`.
pub fn pairing_gap(f: &FuncFamily, g: &HermitianMatrix, g_sub: &HermitianMatrix) -> Result<f64> {
    let m = matrix_derivative(f, g)?;
    let lam = eigh(g)?.values;
    let lam_sub = eigh(g_sub)?.values;
    let grad = f.grad_slice(&lam)?;
    let lhs = m.trace_product(&g_sub.sub(g));
    let rhs: f64 = grad.iter().zip(lam_sub.iter().zip(&lam)).map(|(fi, (ls, l))| fi * (ls - l)).sum();
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn log_det_examples() {
        let f = FuncFamily::log_det(2).unwrap();
        let m = matrix_derivative(&f, &HermitianMatrix::identity(2)).unwrap();
        assert_eq!(m, HermitianMatrix::identity(2));
        let m = matrix_derivative(&f, &HermitianMatrix::from_real_diagonal(&[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(m.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(0, 1).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inadmissible_is_rejected() {
        let f = FuncFamily::log_det(2).unwrap();
        let g = HermitianMatrix::from_real_diagonal(&[1.0, -2.0]);
        assert!(matches!(matrix_derivative(&f, &g), Err(Error::Inadmissible(_))));
    }
}
