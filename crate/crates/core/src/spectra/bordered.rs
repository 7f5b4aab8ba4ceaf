use num_complex::Complex64;
use serde::Serialize;

use super::hermitian::{eigh, HermitianMatrix};
use crate::error::{Error, Result};

/// `[[diag(d), a], [a^H, corner]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedHermitian {
    d: Vec<f64>,
    a: Vec<Complex64>,
    corner: f64,
}

impl BorderedHermitian {
    pub fn new(d: Vec<f64>, a: Vec<Complex64>, corner: f64) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Domain("bordered matrix needs n >= 2".into()));
        }
        if d.len() != a.len() {
            return Err(Error::Domain(format!("d has {} entries but a has {}", d.len(), a.len())));
        }
        if !corner.is_finite()
            || d.iter().any(|x| !x.is_finite())
            || a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain("bordered matrix has non-finite entries".into()));
        }
        Ok(Self { d, a, corner })
    }

    pub fn from_real(d: &[f64], a: &[f64], corner: f64) -> Result<Self> {
        Self::new(d.to_vec(), a.iter().map(|&x| Complex64::new(x, 0.0)).collect(), corner)
    }

    pub fn with_corner(&self, corner: f64) -> Self {
        Self { corner, ..self.clone() }
    }

    /// Full dimension `n`.
    pub fn n(&self) -> usize {
        self.d.len() + 1
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn corner(&self) -> f64 {
        self.corner
    }

    pub fn border_sq(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_matrix(&self) -> HermitianMatrix {
        let n = self.n();
        let mut m = HermitianMatrix::zeros(n);
        for (i, (&d, &a)) in self.d.iter().zip(&self.a).enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
            m.set(i, n - 1, a);
        }
        m.set(n - 1, n - 1, Complex64::new(self.corner, 0.0));
        m
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.to_matrix())?.values)
    }

    fn slack(&self) -> f64 {
        1e-10 * (1.0 + self.to_matrix().frobenius())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("epsilon must be positive, got {eps}")))
    }
}

/// Corner size beyond which the localization conclusion holds.
pub fn growth_threshold(b: &BorderedHermitian, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let n = b.n() as f64;
    let k = 2.0 * n - 3.0;
    let abs_d: f64 = b.d.iter().map(|x| x.abs()).sum();
    Ok(k / eps * b.border_sq() + (n - 1.0) * abs_d + (n - 2.0) * eps / k)
}

/// Threshold of the weaker "some diagonal entry" localization.
pub fn refinement_threshold(b: &BorderedHermitian, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let n = b.n() as f64;
    let diag: f64 = b.d.iter().map(|&x| x + (n - 2.0) * x.abs()).sum();
    Ok(b.border_sq() / eps + diag + (n - 2.0) * eps)
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationVerdict {
    pub epsilon: f64,
    pub threshold: f64,
    pub corner: f64,
    pub intervals: Vec<(f64, f64)>,
    pub top_interval: (f64, f64),
    pub satisfied: bool,
    /// Sorted eigenvalues.
    pub witness: Vec<f64>,
    /// `witness[α]` is matched to `d[assignment[α]]`.
    pub assignment: Vec<usize>,
    /// Largest `|λ_α − d_{σ(α)}| / ε`.
    pub worst_ratio: f64,
    /// Eigenvalues within slack of an interval endpoint.
    pub boundary_hits: usize,
    pub top_at_corner: bool,
}

/// Sorted-to-sorted matching of the lower eigenvalues to the diagonal.
fn sorted_assignment(d: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d.len()).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    idx
}

pub fn localize(b: &BorderedHermitian, eps: f64) -> Result<LocalizationVerdict> {
    let threshold = growth_threshold(b, eps)?;
    let lambda = b.eigenvalues()?;
    let n = b.n();
    let slack = b.slack();
    let assignment = sorted_assignment(&b.d);
    let mut satisfied = true;
    let mut worst_ratio: f64 = 0.0;
    let mut boundary_hits = 0;
    for (alpha, &i) in assignment.iter().enumerate() {
        let gap = (lambda[alpha] - b.d[i]).abs();
        worst_ratio = worst_ratio.max(gap / eps);
        if gap >= eps + slack {
            satisfied = false;
        } else if gap > eps - slack {
            boundary_hits += 1;
        }
    }
    let top = lambda[n - 1];
    let hi = b.corner + (n as f64 - 1.0) * eps;
    if top < b.corner - slack || top >= hi + slack {
        satisfied = false;
    }
    let top_at_corner = (top - b.corner).abs() <= slack;
    if top_at_corner || (top - hi).abs() <= slack {
        boundary_hits += 1;
    }
    Ok(LocalizationVerdict {
        epsilon: eps,
        threshold,
        corner: b.corner,
        intervals: b.d.iter().map(|&d| (d - eps, d + eps)).collect(),
        top_interval: (b.corner, hi),
        satisfied,
        witness: lambda,
        assignment,
        worst_ratio,
        boundary_hits,
        top_at_corner,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementVerdict {
    pub epsilon: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub witness: Vec<f64>,
    /// Nearest diagonal index for each lower eigenvalue.
    pub nearest: Vec<usize>,
    /// `|Σ(d_α − d_{i_α})|`.
    pub displacement: f64,
    pub top_excess: f64,
}

pub fn refinement_localize(b: &BorderedHermitian, eps: f64) -> Result<RefinementVerdict> {
    let threshold = refinement_threshold(b, eps)?;
    let lambda = b.eigenvalues()?;
    let n = b.n();
    let slack = b.slack();
    let mut satisfied = true;
    let mut nearest = Vec::with_capacity(n - 1);
    for &l in &lambda[..n - 1] {
        let (i, gap) = b
            .d
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, (l - d).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("n >= 2");
        if gap >= eps + slack {
            satisfied = false;
        }
        nearest.push(i);
    }
    let displacement = b.d.iter().zip(&nearest).map(|(&d, &i)| d - b.d[i]).sum::<f64>().abs();
    let top_excess = lambda[n - 1] - b.corner;
    if top_excess < -slack || top_excess >= (n as f64 - 1.0) * eps + displacement + slack {
        satisfied = false;
    }
    Ok(RefinementVerdict { epsilon: eps, threshold, satisfied, witness: lambda, nearest, displacement, top_excess })
}

/// `(x−corner)∏(x−d_i) − Σ|a_i|²∏_{j≠i}(x−d_j)`.
pub fn char_poly_residual(b: &BorderedHermitian, x: f64) -> f64 {
    let prod_except = |skip: Option<usize>| -> f64 {
        b.d.iter().enumerate().filter(|(j, _)| Some(*j) != skip).map(|(_, &d)| x - d).product()
    };
    let mut r = (x - b.corner) * prod_except(None);
    for (i, z) in b.a.iter().enumerate() {
        r -= z.norm_sqr() * prod_except(Some(i));
    }
    r
}

/// Magnitude bound of the monomials in `char_poly_residual`.
pub fn char_poly_scale(b: &BorderedHermitian, x: f64) -> f64 {
    let prod_except = |skip: Option<usize>| -> f64 {
        b.d.iter().enumerate().filter(|(j, _)| Some(*j) != skip).map(|(_, &d)| x.abs() + d.abs()).product()
    };
    let mut s = (x.abs() + b.corner.abs()) * prod_except(None);
    for (i, z) in b.a.iter().enumerate() {
        s += z.norm_sqr() * prod_except(Some(i));
    }
    1.0 + s
}

/// Eigenvalue counts on the connected components of `∪(d_α − r, d_α + r)`,
/// `r = ε/(2n−3)`.
///
/// Stability across corners is guaranteed for `n ≥ 3`. At `n = 2` with
/// `|a|² < ε²` the top eigenvalue can start inside the interval at `P₀′`.
#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub components: Vec<(f64, f64)>,
    /// Number of diagonal entries in each component.
    pub expected: Vec<usize>,
    /// `counts[c][j]`: eigenvalues of corner `c` inside component `j`.
    pub counts: Vec<Vec<usize>>,
    /// Whether the top eigenvalue avoids every component, per corner.
    pub top_outside: Vec<bool>,
}

impl Census {
    pub fn is_stable(&self) -> bool {
        self.counts.iter().all(|c| *c == self.expected) && self.top_outside.iter().all(|&t| t)
    }
}

pub fn interval_census(b: &BorderedHermitian, eps: f64, corners: &[f64]) -> Result<Census> {
    let threshold = growth_threshold(b, eps)?;
    let n = b.n();
    let r = eps / (2.0 * n as f64 - 3.0);
    let mut ds = b.d.clone();
    ds.sort_by(f64::total_cmp);
    let mut components: Vec<(f64, f64)> = Vec::new();
    let mut expected: Vec<usize> = Vec::new();
    for &d in &ds {
        match components.last_mut() {
            Some(last) if d - r < last.1 => {
                last.1 = d + r;
                *expected.last_mut().expect("paired") += 1;
            }
            _ => {
                components.push((d - r, d + r));
                expected.push(1);
            }
        }
    }
    let mut counts = Vec::with_capacity(corners.len());
    let mut top_outside = Vec::with_capacity(corners.len());
    for &c in corners {
        if c < threshold {
            return Err(Error::Precondition(format!("corner {c} is below the growth threshold {threshold}")));
        }
        let lambda = b.with_corner(c).eigenvalues()?;
        let inside = |x: f64| components.iter().position(|&(lo, hi)| x > lo && x < hi);
        let mut row = vec![0; components.len()];
        for &l in &lambda {
            if let Some(j) = inside(l) {
                row[j] += 1;
            }
        }
        counts.push(row);
        top_outside.push(inside(lambda[n - 1]).is_none());
    }
    Ok(Census { components, expected, counts, top_outside })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn thresholds() {
        let b = BorderedHermitian::from_real(&[1.0], &[1.0], 0.0).unwrap();
        assert_abs_diff_eq!(growth_threshold(&b, 0.5).unwrap(), 3.0, epsilon = 1e-15);
        let z = BorderedHermitian::from_real(&[0.0], &[0.0], 0.0).unwrap();
        assert_eq!(growth_threshold(&z, 0.7).unwrap(), 0.0);
        let b3 = BorderedHermitian::from_real(&[1.0, -1.0], &[1.0, 0.0], 0.0).unwrap();
        assert_abs_diff_eq!(growth_threshold(&b3, 1.0).unwrap(), 22.0 / 3.0, epsilon = 1e-14);
        assert!(matches!(growth_threshold(&b, 0.0), Err(Error::Domain(_))));
        assert!(matches!(refinement_threshold(&b, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn two_by_two_localization() {
        let b = BorderedHermitian::from_real(&[1.0], &[1.0], 3.0).unwrap();
        let v = localize(&b, 0.5).unwrap();
        assert!(v.satisfied);
        assert_abs_diff_eq!(v.witness[0], 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.witness[1], 2.0 + 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn block_diagonal_exact() {
        let b = BorderedHermitian::from_real(&[0.0], &[0.0], 5.0).unwrap();
        let v = localize(&b, 0.1).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.witness, vec![0.0, 5.0]);
        assert!(v.top_at_corner);
        assert_eq!(v.boundary_hits, 1);
    }

    #[test]
    fn refinement_examples() {
        let b = BorderedHermitian::from_real(&[1.0, 1.0], &[1.0, 1.0], 0.0).unwrap();
        let t = refinement_threshold(&b, 1.0).unwrap();
        assert!(refinement_localize(&b.with_corner(t), 1.0).unwrap().satisfied);
        let b = BorderedHermitian::from_real(&[0.0, 2.0], &[0.5, 0.5], 0.0).unwrap();
        let t = refinement_threshold(&b, 0.4).unwrap();
        assert!(refinement_localize(&b.with_corner(t), 0.4).unwrap().satisfied);
        let b = BorderedHermitian::from_real(&[0.3, -2.0, 1.0], &[0.0, 0.0, 0.0], 4.0).unwrap();
        let v = refinement_localize(&b, 0.01).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.displacement, 0.0);
    }

    #[test]
    fn char_poly_vanishes_at_eigenvalues() {
        let b = BorderedHermitian::from_real(&[1.0], &[1.0], 3.0).unwrap();
        assert!(char_poly_residual(&b, 2.0 - 2f64.sqrt()).abs() < 1e-12);
        let z = BorderedHermitian::from_real(&[0.5, 2.0], &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(char_poly_residual(&z, 0.5), 0.0);
    }

    #[test]
    fn census_examples() {
        let b = BorderedHermitian::from_real(&[0.0, 2.0], &[1.0, 1.0], 0.0).unwrap();
        let p = growth_threshold(&b, 1.0).unwrap();
        let c = interval_census(&b, 1.0, &[p, 2.0 * p, 10.0 * p]).unwrap();
        assert!(c.is_stable());
        assert!(c.counts.iter().all(|row| row == &vec![1, 1]));
        let b = BorderedHermitian::from_real(&[1.0], &[1.0], 0.0).unwrap();
        let c = interval_census(&b, 0.5, &[3.0, 30.0]).unwrap();
        assert_eq!(c.counts, vec![vec![1], vec![1]]);
        assert!(matches!(interval_census(&b, 0.5, &[2.0]), Err(Error::Precondition(_))));
        let b = BorderedHermitian::from_real(&[1.0, 1.0, 3.0], &[0.0; 3], 0.0).unwrap();
        let c = interval_census(&b, 0.2, &[20.0]).unwrap();
        assert_eq!(c.expected, vec![2, 1]);
        assert_eq!(c.counts, vec![vec![2, 1]]);
    }
}
