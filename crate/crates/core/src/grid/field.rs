use std::sync::Arc;

use num_complex::Complex64;

use super::domain::{GridDomain, NodeKind};
use crate::error::{Error, Result};
use crate::spectra::HermitianMatrix;

/// One finite real value per node.
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Domain(format!("field has {} values, grid has {} nodes", values.len(), domain.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("field value at node {i} is not finite")));
        }
        Ok(Self { domain, values })
    }

    pub fn constant(domain: Arc<GridDomain>, v: f64) -> Self {
        let values = vec![v; domain.len()];
        Self { domain, values }
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        Self::constant(domain, 0.0)
    }

    /// Samples `f` at node coordinates.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..domain.len()).map(|i| f(&domain.coords(i))).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Same values on a grid with identical geometry (e.g. a new mask).
    pub fn on_domain(&self, domain: Arc<GridDomain>) -> Result<Self> {
        if !self.domain.same_geometry(&domain) {
            return Err(Error::Domain("grids differ in geometry".into()));
        }
        Ok(Self { domain, values: self.values.clone() })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.domain.same_geometry(&other.domain) {
            return Err(Error::Domain("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect();
        Ok(Self { domain: self.domain.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + t * b)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { domain: self.domain.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    fn active(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(self.domain.mask()).filter(|(_, k)| **k != NodeKind::Exterior).map(|(v, _)| *v)
    }

    /// Max over non-exterior nodes.
    pub fn max(&self) -> f64 {
        self.active().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Min over non-exterior nodes.
    pub fn min(&self) -> f64 {
        self.active().fold(f64::INFINITY, f64::min)
    }

    /// Sup-norm over non-exterior nodes.
    pub fn max_abs(&self) -> f64 {
        self.active().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm of `self − other` over non-exterior nodes of `self`.
    pub fn dist(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

/// One `n × n` Hermitian matrix per node.
#[derive(Debug, Clone)]
pub struct HermitianField {
    domain: Arc<GridDomain>,
    mats: Vec<HermitianMatrix>,
}

impl HermitianField {
    pub fn new(domain: Arc<GridDomain>, mats: Vec<HermitianMatrix>) -> Result<Self> {
        if mats.len() != domain.len() {
            return Err(Error::Domain(format!("field has {} matrices, grid has {} nodes", mats.len(), domain.len())));
        }
        if mats.iter().any(|m| m.dim() != domain.n()) {
            return Err(Error::Domain(format!("matrices must be {0}×{0}", domain.n())));
        }
        Ok(Self { domain, mats })
    }

    pub fn constant(domain: Arc<GridDomain>, m: HermitianMatrix) -> Result<Self> {
        let mats = vec![m; domain.len()];
        Self::new(domain, mats)
    }

    pub fn identity(domain: Arc<GridDomain>) -> Self {
        let n = domain.n();
        Self::constant(domain, HermitianMatrix::identity(n)).expect("identity has the grid dimension")
    }

    /// `s(z)·I` per node.
    pub fn scalar_multiple(s: &ScalarField) -> Self {
        let n = s.domain().n();
        let mats = s
            .values()
            .iter()
            .map(|&v| HermitianMatrix::from_real_diagonal(&vec![v; n]))
            .collect();
        Self { domain: s.domain().clone(), mats }
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    #[inline]
    pub fn get(&self, idx: usize) -> &HermitianMatrix {
        &self.mats[idx]
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    pub fn on_domain(&self, domain: Arc<GridDomain>) -> Result<Self> {
        if !self.domain.same_geometry(&domain) {
            return Err(Error::Domain("grids differ in geometry".into()));
        }
        Ok(Self { domain, mats: self.mats.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.domain.same_geometry(&other.domain) {
            return Err(Error::Domain("fields live on different grids".into()));
        }
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect();
        Ok(Self { domain: self.domain.clone(), mats })
    }

    pub fn trace(&self) -> ScalarField {
        let values = self.mats.iter().map(|m| m.trace()).collect();
        ScalarField { domain: self.domain.clone(), values }
    }

    /// Largest deviation from conjugate symmetry over all nodes.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.domain.n();
        let mut worst: f64 = 0.0;
        for m in &self.mats {
            for i in 0..n {
                for j in 0..n {
                    let d: Complex64 = m.get(i, j) - m.get(j, i).conj();
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }
}
