//! Symmetric functions on Gårding cones.
//!
//! A [`FuncFamily`] pairs a concave, elliptic symmetric function `f` with its
//! natural cone `Γ_k = {σ_1 > 0, …, σ_k > 0}`. Everything here is pure and
//! operates on small eigenvalue tuples.

mod cone;
mod family;
mod level;
mod structure;

pub use cone::{
    gamma_g_criteria, in_gamma_g, in_gamma_g_numeric, ConeVerdict, GammaGCriteria, GammaGMethod,
    DEFAULT_T_MAX,
};
pub use family::{FamilyKind, FuncFamily};
pub use level::{level_along, level_on_ray, level_on_shift, level_tolerance};
pub use structure::{check_structure, coercivity_floor, gradient_sum, StructureReport, FD_STEP, FD_TOL, HESSIAN_TOL};

use crate::error::{Error, Result};

/// An eigenvalue tuple `λ = (λ_1, …, λ_n)` with `n ≥ 2` finite entries.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct LambdaTuple(Vec<f64>);

impl LambdaTuple {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "eigenvalue tuple needs n >= 2 entries, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite eigenvalue {bad}")));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + t·1⃗`.
    pub fn shifted(&self, t: f64) -> Self {
        Self(self.0.iter().map(|v| v + t).collect())
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self(self.0.iter().map(|v| v * t).collect())
    }

    /// `self + t·e_axis`.
    pub fn bumped(&self, axis: usize, t: f64) -> Self {
        let mut v = self.0.clone();
        v[axis] += t;
        Self(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Index<usize> for LambdaTuple {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Coefficients `e_0, …, e_kmax` of `∏(x + λ_i)`, i.e. the elementary symmetric
/// polynomials of `values`, via the one-factor-at-a-time recurrence.
pub(crate) fn elementary(values: &[f64], kmax: usize) -> Vec<f64> {
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        let top = (i + 1).min(kmax);
        for j in (1..=top).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// `σ_k` of `values` with entries `skip` removed; `σ_k = 0` for `k < 0`.
pub(crate) fn sigma_without(values: &[f64], k: isize, skip: &[usize]) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = k as usize;
    let rest: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, v)| *v)
        .collect();
    if k > rest.len() {
        return 0.0;
    }
    elementary(&rest, k)[k]
}

/// The `k`-th elementary symmetric polynomial, `σ_0 = 1`.
pub fn sigma_k(lambda: &LambdaTuple, k: usize) -> Result<f64> {
    let n = lambda.len();
    if k > n {
        return Err(Error::Domain(format!("sigma_k needs 0 <= k <= n = {n}, got k = {k}")));
    }
    Ok(elementary(lambda.as_slice(), k)[k])
}

/// Gårding cone membership: `σ_j(λ) > 0` for every `1 ≤ j ≤ k`.
pub fn in_cone(lambda: &LambdaTuple, k: usize) -> bool {
    cone_margin(lambda.as_slice(), k) > 0.0
}

/// `min_{1≤j≤k} σ_j(λ)`; positive exactly on `Γ_k`.
pub fn cone_margin(values: &[f64], k: usize) -> f64 {
    let k = k.min(values.len());
    let e = elementary(values, k);
    e[1..=k].iter().copied().fold(f64::INFINITY, f64::min)
}

/// Value, gradient and Hessian of `σ_k` at a point.
#[derive(Debug, Clone)]
pub(crate) struct SigmaJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

impl SigmaJet {
    pub fn new(values: &[f64], k: usize) -> Self {
        let n = values.len();
        let value = if k > n { 0.0 } else { elementary(values, k)[k] };
        let k = k as isize;
        let grad = (0..n).map(|i| sigma_without(values, k - 1, &[i])).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let h = sigma_without(values, k - 2, &[i, j]);
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Self { value, grad, hess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lt(v: &[f64]) -> LambdaTuple {
        LambdaTuple::from_slice(v).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_abs_diff_eq!(sigma_k(&lt(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0);
        assert_abs_diff_eq!(sigma_k(&lt(&[1.0, 1.0, 1.0]), 3).unwrap(), 1.0);
        assert_abs_diff_eq!(sigma_k(&lt(&[-0.5, 1.0, 1.0]), 2).unwrap(), 0.0);
        assert_abs_diff_eq!(sigma_k(&lt(&[4.0, 5.0]), 0).unwrap(), 1.0);
    }

    #[test]
    fn sigma_k_out_of_range() {
        assert!(matches!(sigma_k(&lt(&[1.0, 2.0]), 3), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_tuple_rejects_short_and_nan() {
        assert!(LambdaTuple::new(vec![1.0]).is_err());
        assert!(LambdaTuple::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn cone_examples() {
        assert!(in_cone(&lt(&[1.0, 1.0, 1.0]), 3));
        assert!(!in_cone(&lt(&[-0.5, 1.0, 1.0]), 2));
        assert!(in_cone(&lt(&[-0.4, 1.0, 1.0]), 2));
    }

    #[test]
    fn sigma_matches_subset_enumeration() {
        let v = [0.3, -1.2, 2.5, 0.7, -0.1, 1.9];
        for k in 0..=v.len() {
            let mut brute = 0.0;
            for mask in 0u32..(1 << v.len()) {
                if mask.count_ones() as usize == k {
                    brute += (0..v.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| v[i])
                        .product::<f64>();
                }
            }
            assert_abs_diff_eq!(sigma_k(&lt(&v), k).unwrap(), brute, epsilon = 1e-12);
        }
    }

    #[test]
    fn sigma_large_n_is_finite() {
        let v: Vec<f64> = (0..40).map(|i| 1.0 + 0.01 * i as f64).collect();
        let s = sigma_k(&lt(&v), 20).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn jet_derivatives_match_differences() {
        let v = [0.8, 1.3, 2.1, 0.4];
        let jet = SigmaJet::new(&v, 3);
        let h = 1e-6;
        for i in 0..v.len() {
            let mut p = v;
            let mut m = v;
            p[i] += h;
            m[i] -= h;
            let fd = (elementary(&p, 3)[3] - elementary(&m, 3)[3]) / (2.0 * h);
            assert_abs_diff_eq!(jet.grad[i], fd, epsilon = 1e-8);
        }
    }
}
